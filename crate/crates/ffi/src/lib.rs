//! C ABI over `hopflab`.
//!
//! Meshes and maps are opaque heap handles released with their `_free`
//! function. Every fallible call returns an [`HlStatus`]; on failure the
//! message is kept per thread and read back with [`hl_last_error`].
//! Complex arrays are interleaved `re, im` doubles.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use num_complex::Complex64;

use hopflab::boundary::harmonic_extension;
use hopflab::energy::{jacobian_stats, minimize_admissible, MinimizerOutcome, SolverConfig};
use hopflab::gallery::GalleryMap;
use hopflab::hopf::hopf_product;
use hopflab::mesh::wirtinger;
use hopflab::topology::{capacity, default_fiber_radius, degree_in_preimage, disk_plate, image_grid, monotonicity_report};
use hopflab::{DiscreteMap, Error, UnitDiskMesh};

/// Result codes. Zero is success.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    MeshMismatch = 3,
    Domain = 4,
    Orientation = 5,
    BoundaryAdjacent = 6,
    Numerical = 7,
    Io = 8,
    Parse = 9,
    /// The call panicked; the library state is unchanged.
    Internal = 10,
    /// A computation finished without meeting its tolerance.
    Infeasible = 11,
}

fn status_of(e: &Error) -> HlStatus {
    match e.root() {
        Error::InvalidMesh(_)
        | Error::InvalidArgument(_)
        | Error::NotInjective(..)
        | Error::OffPolygon(_)
        | Error::UnknownGallery(_)
        | Error::EmptyPlate
        | Error::SegmentOutside
        | Error::SeedOutside(_)
        | Error::SeedAtCriticalPoint(_)
        | Error::InapplicableTermination
        | Error::Geometry(_)
        | Error::BelowResolution { .. } => HlStatus::InvalidArgument,
        Error::VertexCountMismatch { .. } | Error::MeshMismatch | Error::TraceMismatch => HlStatus::MeshMismatch,
        Error::Domain { .. } | Error::NearBoundary(_) => HlStatus::Domain,
        Error::Orientation(_) => HlStatus::Orientation,
        Error::BoundaryAdjacent | Error::PlateTouchesBoundary => HlStatus::BoundaryAdjacent,
        Error::NonFinite(_) | Error::IdenticallyZero | Error::SolverDiverged(_) => HlStatus::Numerical,
        Error::Io(_) => HlStatus::Io,
        Error::Parse(_) => HlStatus::Parse,
        Error::Stage { .. } => HlStatus::Internal,
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Runs `f`, recording any error or panic.
fn guard(f: impl FnOnce() -> Result<HlStatus, (HlStatus, String)>) -> HlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => status,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {msg}"));
            HlStatus::Internal
        }
    }
}

fn fail(e: Error) -> (HlStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (HlStatus, String) {
    (HlStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (HlStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn complex_slice(xy: *const f64, n: usize, what: &str) -> Result<Vec<Complex64>, (HlStatus, String)> {
    if xy.is_null() {
        return Err(null(what));
    }
    let raw = std::slice::from_raw_parts(xy, 2 * n);
    Ok(raw.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect())
}

unsafe fn str_arg<'a>(s: *const c_char, what: &str) -> Result<&'a str, (HlStatus, String)> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| (HlStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), (HlStatus, String)> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

/// Opaque ring mesh of the closed unit disk.
pub struct HlMesh {
    inner: UnitDiskMesh,
}

/// Opaque piecewise-linear map on a mesh.
pub struct HlMap {
    inner: DiscreteMap,
}

fn boxed_map(map: DiscreteMap) -> *mut HlMap {
    Box::into_raw(Box::new(HlMap { inner: map }))
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length, 0 if none.
///
/// # Safety
/// `buf` must be valid for `len` bytes, or null with `len == 0`.
#[no_mangle]
pub unsafe extern "C" fn hl_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| match &*e.borrow() {
        None => 0,
        Some(msg) => {
            let bytes = msg.as_bytes();
            if !buf.is_null() && len > 0 {
                let n = bytes.len().min(len - 1);
                ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
                *buf.add(n) = 0;
            }
            bytes.len()
        }
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Builds the mesh with `rings` rings and `sectors` sectors.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hl_mesh_new(rings: usize, sectors: usize, out: *mut *mut HlMesh) -> HlStatus {
    guard(|| {
        let mesh = UnitDiskMesh::build(rings, sectors).map_err(fail)?;
        write_out(out, Box::into_raw(Box::new(HlMesh { inner: mesh })), "out")?;
        Ok(HlStatus::Ok)
    })
}

/// # Safety
/// `mesh` must come from [`hl_mesh_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hl_mesh_free(mesh: *mut HlMesh) {
    if !mesh.is_null() {
        drop(Box::from_raw(mesh));
    }
}

/// # Safety
/// `mesh` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn hl_mesh_vertex_count(mesh: *const HlMesh) -> usize {
    mesh.as_ref().map_or(0, |m| m.inner.vertex_count())
}

/// # Safety
/// `mesh` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn hl_mesh_triangle_count(mesh: *const HlMesh) -> usize {
    mesh.as_ref().map_or(0, |m| m.inner.triangle_count())
}

/// Writes `2 * vertex_count` doubles into `xy`.
///
/// # Safety
/// `xy` must be valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn hl_mesh_vertices(mesh: *const HlMesh, xy: *mut f64, len: usize) -> HlStatus {
    guard(|| {
        let mesh = deref(mesh, "mesh")?;
        copy_complex(&mesh.inner.vertices, xy, len)
    })
}

/// Writes `3 * triangle_count` vertex indices into `idx`.
///
/// # Safety
/// `idx` must be valid for `len` entries.
#[no_mangle]
pub unsafe extern "C" fn hl_mesh_triangles(mesh: *const HlMesh, idx: *mut usize, len: usize) -> HlStatus {
    guard(|| {
        let mesh = deref(mesh, "mesh")?;
        if idx.is_null() {
            return Err(null("idx"));
        }
        let need = 3 * mesh.inner.triangle_count();
        if len < need {
            return Err((HlStatus::InvalidArgument, format!("buffer holds {len} entries, need {need}")));
        }
        let out = std::slice::from_raw_parts_mut(idx, need);
        for (dst, tri) in out.chunks_exact_mut(3).zip(&mesh.inner.triangles) {
            dst.copy_from_slice(tri);
        }
        Ok(HlStatus::Ok)
    })
}

unsafe fn copy_complex(values: &[Complex64], xy: *mut f64, len: usize) -> Result<HlStatus, (HlStatus, String)> {
    if xy.is_null() {
        return Err(null("output buffer"));
    }
    let need = 2 * values.len();
    if len < need {
        return Err((HlStatus::InvalidArgument, format!("buffer holds {len} doubles, need {need}")));
    }
    for (k, v) in values.iter().enumerate() {
        *xy.add(2 * k) = v.re;
        *xy.add(2 * k + 1) = v.im;
    }
    Ok(HlStatus::Ok)
}

/// Map from `vertex_count` interleaved vertex values.
///
/// # Safety
/// `xy` must hold `2 * n` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn hl_map_from_values(
    mesh: *const HlMesh,
    xy: *const f64,
    n: usize,
    out: *mut *mut HlMap,
) -> HlStatus {
    guard(|| {
        let mesh = deref(mesh, "mesh")?;
        let values = complex_slice(xy, n, "xy")?;
        let map = DiscreteMap::new(&mesh.inner, values).map_err(fail)?;
        write_out(out, boxed_map(map), "out")?;
        Ok(HlStatus::Ok)
    })
}

/// Samples a gallery map such as `"fig1"` or `"power:2"` at the vertices.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn hl_map_gallery(mesh: *const HlMesh, name: *const c_char, out: *mut *mut HlMap) -> HlStatus {
    guard(|| {
        let mesh = deref(mesh, "mesh")?;
        let g: GalleryMap = str_arg(name, "name")?.parse().map_err(fail)?;
        let map = g.sample(&mesh.inner).map_err(fail)?;
        write_out(out, boxed_map(map), "out")?;
        Ok(HlStatus::Ok)
    })
}

/// Poisson extension of boundary values given in boundary-loop order.
///
/// # Safety
/// `xy` must hold `2 * n` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn hl_map_harmonic(
    mesh: *const HlMesh,
    xy: *const f64,
    n: usize,
    out: *mut *mut HlMap,
) -> HlStatus {
    guard(|| {
        let mesh = deref(mesh, "mesh")?;
        let b = complex_slice(xy, n, "xy")?;
        let map = harmonic_extension(&b, &mesh.inner).map_err(fail)?;
        write_out(out, boxed_map(map), "out")?;
        Ok(HlStatus::Ok)
    })
}

/// # Safety
/// `map` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hl_map_free(map: *mut HlMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// # Safety
/// `xy` must be valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn hl_map_values(map: *const HlMap, xy: *mut f64, len: usize) -> HlStatus {
    guard(|| {
        let map = deref(map, "map")?;
        copy_complex(&map.inner.values, xy, len)
    })
}

/// Writes the boundary values of `map` in loop order.
///
/// # Safety
/// `xy` must be valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn hl_map_boundary_values(
    mesh: *const HlMesh,
    map: *const HlMap,
    xy: *mut f64,
    len: usize,
) -> HlStatus {
    guard(|| {
        let (mesh, map) = (deref(mesh, "mesh")?, deref(map, "map")?);
        map.inner.check_mesh(&mesh.inner).map_err(fail)?;
        copy_complex(&map.inner.boundary_values(&mesh.inner), xy, len)
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct HlEnergy {
    pub dirichlet: f64,
    pub negative_jacobian_mass: f64,
    pub min_jacobian: f64,
}

/// # Safety
/// Handles must be live; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn hl_energy(mesh: *const HlMesh, map: *const HlMap, out: *mut HlEnergy) -> HlStatus {
    guard(|| {
        let (mesh, map) = (deref(mesh, "mesh")?, deref(map, "map")?);
        let s = jacobian_stats(&wirtinger(&mesh.inner, &map.inner).map_err(fail)?);
        let e = HlEnergy { dirichlet: s.dirichlet, negative_jacobian_mass: s.negative_jacobian_mass, min_jacobian: s.min_jacobian };
        write_out(out, e, "out")?;
        Ok(HlStatus::Ok)
    })
}

/// Constrained minimizer for boundary values in loop order. `solver_json`
/// may be null for defaults. The map is written even when the result is
/// infeasible, in which case the status is `Infeasible`.
///
/// # Safety
/// `xy` must hold `2 * n` doubles; `solver_json` must be null or a
/// NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn hl_minimize(
    mesh: *const HlMesh,
    xy: *const f64,
    n: usize,
    solver_json: *const c_char,
    out: *mut *mut HlMap,
) -> HlStatus {
    guard(|| {
        let mesh = deref(mesh, "mesh")?;
        let b = complex_slice(xy, n, "xy")?;
        let config: SolverConfig = if solver_json.is_null() {
            SolverConfig::default()
        } else {
            serde_json::from_str(str_arg(solver_json, "solver_json")?).map_err(|e| fail(e.into()))?
        };
        let result = minimize_admissible(&b, &mesh.inner, &config).map_err(fail)?;
        let feasible = result.outcome == MinimizerOutcome::Feasible;
        write_out(out, boxed_map(result.map), "out")?;
        if feasible {
            Ok(HlStatus::Ok)
        } else {
            set_error("minimizer stopped before reaching the Jacobian tolerance".into());
            Ok(HlStatus::Infeasible)
        }
    })
}

/// Discrete degree of `map` over the ball `B(y, r)`. A radius of zero or
/// less selects the default.
///
/// # Safety
/// Handles must be live; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn hl_degree(
    mesh: *const HlMesh,
    map: *const HlMap,
    y_re: f64,
    y_im: f64,
    radius: f64,
    out: *mut i64,
) -> HlStatus {
    guard(|| {
        let (mesh, map) = (deref(mesh, "mesh")?, deref(map, "map")?);
        let r = if radius > 0.0 { radius } else { default_fiber_radius(&mesh.inner) };
        let rep = degree_in_preimage(&mesh.inner, &map.inner, Complex64::new(y_re, y_im), r).map_err(fail)?;
        write_out(out, rep.total_degree, "out")?;
        Ok(HlStatus::Ok)
    })
}

/// Capacity of the disk `|z| ≤ radius` relative to the unit disk.
///
/// # Safety
/// `mesh` must be live; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn hl_capacity_disk(mesh: *const HlMesh, radius: f64, out: *mut f64) -> HlStatus {
    guard(|| {
        let mesh = deref(mesh, "mesh")?;
        let cap = capacity(&mesh.inner, &disk_plate(&mesh.inner, radius)).map_err(fail)?;
        write_out(out, cap, "out")?;
        Ok(HlStatus::Ok)
    })
}

/// Holomorphy residual of the Hopf product of `map`.
///
/// # Safety
/// Handles must be live; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn hl_hopf_residual(mesh: *const HlMesh, map: *const HlMap, out: *mut f64) -> HlStatus {
    guard(|| {
        let (mesh, map) = (deref(mesh, "mesh")?, deref(map, "map")?);
        let hopf = hopf_product(&mesh.inner, &wirtinger(&mesh.inner, &map.inner).map_err(fail)?).map_err(fail)?;
        write_out(out, hopf.residual, "out")?;
        Ok(HlStatus::Ok)
    })
}

/// Largest number of fiber components over a `grid × grid` sample of the
/// image. A radius of zero or less selects the default.
///
/// # Safety
/// Handles must be live; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn hl_monotonicity(
    mesh: *const HlMesh,
    map: *const HlMap,
    grid: usize,
    radius: f64,
    out: *mut usize,
) -> HlStatus {
    guard(|| {
        let (mesh, map) = (deref(mesh, "mesh")?, deref(map, "map")?);
        let r = if radius > 0.0 { radius } else { default_fiber_radius(&mesh.inner) };
        let points = image_grid(&mesh.inner, &map.inner, grid, r).map_err(fail)?;
        let rep = monotonicity_report(&mesh.inner, &map.inner, &points, r).map_err(fail)?;
        write_out(out, rep.max_components, "out")?;
        Ok(HlStatus::Ok)
    })
}

/// Runs a scene given as JSON, with relative paths resolved against
/// `base_dir` (null for the working directory). The report is returned as
/// a string to be released with [`hl_string_free`].
///
/// # Safety
/// String arguments must be NUL-terminated; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn hl_run_scene(scene_json: *const c_char, base_dir: *const c_char, out: *mut *mut c_char) -> HlStatus {
    guard(|| {
        let scene = hopflab::cli::SceneConfig::from_json(str_arg(scene_json, "scene_json")?).map_err(fail)?;
        let base = if base_dir.is_null() { "." } else { str_arg(base_dir, "base_dir")? };
        let report = hopflab::cli::run(&scene, Path::new(base)).map_err(fail)?;
        let text = serde_json::to_string(&report).map_err(|e| fail(e.into()))?;
        let c = CString::new(text).map_err(|_| (HlStatus::Internal, "report contains NUL".to_string()))?;
        write_out(out, c.into_raw(), "out")?;
        Ok(if report.ok() { HlStatus::Ok } else { HlStatus::Infeasible })
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
