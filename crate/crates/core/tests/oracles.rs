use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hopflab::boundary::{
    harmonic_extension, interior_point, sample_boundary, BoundaryFile, BoundarySpec,
};
use hopflab::energy::{jacobian_stats, minimize_admissible, MinimizerOutcome, SolverConfig};
use hopflab::gallery::{self, GalleryMap};
use hopflab::hopf::{hopf_product, trace_trajectory, HopfField, Orientation, Termination, TraceConfig};
use hopflab::mesh::{wirtinger, DiscreteMap, UnitDiskMesh};
use hopflab::topology::{
    capacity, capacity_blowup_profile, default_fiber_radius, degree_equality_check, degree_in_preimage,
    fiber_components, segment_plate,
};
use hopflab::Error;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn capacity_of_centred_disk() {
    let mesh = UnitDiskMesh::build(64, 8).unwrap();
    let rho = 0.5;
    let plate: Vec<usize> = (0..mesh.triangle_count())
        .filter(|&t| mesh.triangles[t].iter().all(|&v| mesh.vertices[v].norm() <= rho + 1e-12))
        .collect();
    let cap = capacity(&mesh, &plate).unwrap();
    let exact = 2.0 * PI / (1.0 / rho).ln();
    assert!((cap - exact).abs() / exact < 0.03, "{cap} vs {exact}");
}

#[test]
fn capacity_is_mobius_invariant() {
    // z ↦ (z + a)/(1 + āz) carries B(0, ρ) onto a disk with this centre and radius.
    let (rho, a) = (0.3, 0.4);
    let centre = a * (1.0 - rho * rho) / (1.0 - a * a * rho * rho);
    let radius = rho * (1.0 - a * a) / (1.0 - a * a * rho * rho);
    let mesh = UnitDiskMesh::build(64, 8).unwrap();
    let inside = |r: f64, o: f64| -> Vec<usize> {
        (0..mesh.triangle_count())
            .filter(|&t| mesh.triangles[t].iter().all(|&v| (mesh.vertices[v] - o).norm() <= r))
            .collect()
    };
    let centred = capacity(&mesh, &inside(rho, 0.0)).unwrap();
    let moved = capacity(&mesh, &inside(radius, centre)).unwrap();
    let exact = 2.0 * PI / (1.0 / rho).ln();
    assert!((centred - moved).abs() / exact < 0.05, "{centred} vs {moved}");
}

#[test]
fn capacity_blows_up_near_the_circle() {
    let mesh = UnitDiskMesh::build(48, 8).unwrap();
    let profile = capacity_blowup_profile(&mesh, 0.5, &[0.3, 0.2, 0.1, 0.05]).unwrap();
    assert!(profile.windows(2).all(|w| w[1] > w[0]), "{profile:?}");
    let plate = segment_plate(&mesh, -0.5, 0.5).unwrap();
    assert!(capacity(&mesh, &plate).unwrap() > 0.0);
    assert_eq!(segment_plate(&mesh, 0.5, 1.2), Err(Error::SegmentOutside));
}

#[test]
fn example2_collapses_a_circle() {
    let mesh = UnitDiskMesh::build(40, 8).unwrap();
    let h = GalleryMap::Example2.sample(&mesh).unwrap();
    let comps = fiber_components(&mesh, &h, c(0.5, 0.0), 0.05).unwrap();
    assert_eq!(comps.len(), 2);
    // One component rings the circle |z| = 1/4, the other sits at z = 3/4.
    let spans: Vec<(f64, f64)> = comps
        .iter()
        .map(|comp| {
            let radii: Vec<f64> = comp.triangles.iter().map(|&t| mesh.centroid(t).norm()).collect();
            let lo = radii.iter().cloned().fold(f64::MAX, f64::min);
            let hi = radii.iter().cloned().fold(0.0, f64::max);
            (lo, hi)
        })
        .collect();
    assert!(spans.iter().any(|&(lo, hi)| lo > 0.15 && hi < 0.35), "{spans:?}");
    assert!(spans.iter().any(|&(lo, hi)| lo > 0.65 && hi < 0.85));
}

#[test]
fn square_fold_doubles_fibers() {
    let mesh = UnitDiskMesh::build(32, 8).unwrap();
    let h = GalleryMap::SquareFold.sample(&mesh).unwrap();
    // x ↦ 2x on the left half and 4 - 2x on the right meet at 2.
    let comps = fiber_components(&mesh, &h, c(1.6, 1.0), 0.02).unwrap();
    assert_eq!(comps.len(), 2);
    let stats = jacobian_stats(&wirtinger(&mesh, &h).unwrap());
    assert!(stats.min_jacobian < 0.0);
}

#[test]
fn degree_counts_sheets() {
    let mesh = UnitDiskMesh::build(32, 8).unwrap();
    for n in 1..=3u32 {
        let h = DiscreteMap::from_fn(&mesh, |z| gallery::power(z, n)).unwrap();
        let rep = degree_in_preimage(&mesh, &h, c(0.0, 0.0), 0.05).unwrap();
        assert_eq!(rep.total_degree, n as i64);
        assert!((rep.total_jacobian_degree() - n as f64).abs() < 0.1);
    }
    // Off-centre target of z²: two sheets, one each.
    let h = DiscreteMap::from_fn(&mesh, |z| z * z).unwrap();
    let rep = degree_in_preimage(&mesh, &h, c(0.25, 0.0), 0.02).unwrap();
    assert_eq!(rep.components.len(), 2);
    assert!(rep.components.iter().all(|c| c.degree_winding == Some(1)));
    // A ball meeting the trace is refused.
    assert_eq!(degree_in_preimage(&mesh, &h, c(0.95, 0.0), 0.05).unwrap_err(), Error::BoundaryAdjacent);
}

#[test]
fn degree_equality_survives_interior_noise() {
    let mesh = UnitDiskMesh::build(24, 8).unwrap();
    let spec = BoundarySpec::gallery(GalleryMap::Fig1).unwrap();
    let f = harmonic_extension(&sample_boundary(&spec, &mesh).unwrap(), &mesh).unwrap();
    let y = interior_point(&spec.target_polygon).unwrap();
    let r = default_fiber_radius(&mesh);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let mut values = f.values.clone();
        for v in mesh.interior_vertices() {
            values[v] += c(rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3));
        }
        let h = DiscreteMap::new(&mesh, values).unwrap();
        let eq = degree_equality_check(&mesh, &h, &f, y, r).unwrap();
        assert!(eq.equal && eq.map_degree == 1, "{eq:?}");
    }
    let mut shifted = f.values.clone();
    shifted[mesh.boundary_loop[0]] += 1e-9;
    let h = DiscreteMap::new(&mesh, shifted).unwrap();
    assert_eq!(degree_equality_check(&mesh, &h, &f, y, r).unwrap_err(), Error::TraceMismatch);
}

#[test]
fn fig1_minimizer_beats_nothing_but_is_feasible() {
    let mesh = UnitDiskMesh::build(16, 6).unwrap();
    let spec = BoundarySpec::gallery(GalleryMap::Fig1).unwrap();
    let b = sample_boundary(&spec, &mesh).unwrap();
    let harmonic = harmonic_extension(&b, &mesh).unwrap();
    let hs = jacobian_stats(&wirtinger(&mesh, &harmonic).unwrap());
    assert!(hs.min_jacobian < 0.0);
    let result = minimize_admissible(&b, &mesh, &SolverConfig::default()).unwrap();
    assert_eq!(result.outcome, MinimizerOutcome::Feasible);
    assert!(result.breakdown.min_jacobian >= -result.jacobian_tolerance);
    assert!(result.breakdown.dirichlet > hs.dirichlet);
    assert!(result.energy_history.windows(2).filter(|w| w[1] > w[0] * (1.0 + 1e-12)).count() <= result.stages.len());
}

#[test]
fn harmonic_extension_reproduces_harmonic_polynomials() {
    let mut errors = Vec::new();
    for rings in [8, 16, 32] {
        let mesh = UnitDiskMesh::build(rings, 6).unwrap();
        let spec = BoundarySpec::gallery(GalleryMap::Fig1).unwrap();
        let h = harmonic_extension(&sample_boundary(&spec, &mesh).unwrap(), &mesh).unwrap();
        let err = mesh
            .vertices
            .iter()
            .zip(&h.values)
            .filter(|(z, _)| z.norm() < 0.9)
            .map(|(z, w)| (gallery::fig1(*z) - w).norm())
            .fold(0.0, f64::max);
        errors.push(err);
    }
    assert!(errors[2] < errors[0], "{errors:?}");
    assert!(errors[2] < 1e-3, "{errors:?}");
}

#[test]
fn boundary_file_round_trip() {
    let spec = BoundarySpec::gallery(GalleryMap::Fig1).unwrap();
    let file = spec.to_file_model();
    let text = serde_json::to_string(&file).unwrap();
    let back = BoundarySpec::from_json(&text).unwrap();
    assert_eq!(back, spec);

    let samples: Vec<[f64; 3]> = (0..32)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / 32.0;
            [t, 2.0 * t.cos(), t.sin()]
        })
        .collect();
    let file = BoundaryFile { kind: "samples".into(), samples, polygon: Vec::new() };
    let spec = BoundarySpec::from_file_model(&file).unwrap();
    assert_eq!(spec.winding_number().unwrap(), 1);
    let mesh = UnitDiskMesh::build(8, 4).unwrap();
    assert_eq!(sample_boundary(&spec, &mesh).unwrap().len(), 32);
}

#[test]
fn reversed_boundary_is_rejected() {
    let mesh = UnitDiskMesh::build(6, 6).unwrap();
    let b: Vec<Complex64> = mesh.boundary_loop.iter().map(|&v| mesh.vertices[v].conj()).collect();
    assert_eq!(minimize_admissible(&b, &mesh, &SolverConfig::default()).unwrap_err(), Error::Orientation(-1));
}

#[test]
fn horizontal_and_vertical_families_are_orthogonal() {
    let mesh = UnitDiskMesh::build(24, 8).unwrap();
    let h = DiscreteMap::from_fn(&mesh, |z| z + c(0.0, 0.3) * z.conj()).unwrap();
    let hopf = hopf_product(&mesh, &wirtinger(&mesh, &h).unwrap()).unwrap();
    let cfg = TraceConfig::default();
    let v = trace_trajectory(&hopf, &mesh, c(0.1, 0.1), Orientation::Vertical, &cfg).unwrap();
    let hz = trace_trajectory(&hopf, &mesh, c(0.1, 0.1), Orientation::Horizontal, &cfg).unwrap();
    assert_eq!(v.termination, [Termination::ReachedBoundary; 2]);
    let dv = v.endpoints[1] - v.endpoints[0];
    let dh = hz.endpoints[1] - hz.endpoints[0];
    assert!((dv.conj() * dh).re.abs() < 1e-9 * dv.norm() * dh.norm());
    // Negating the differential swaps the families.
    let swapped = trace_trajectory(&hopf.negated(), &mesh, c(0.1, 0.1), Orientation::Horizontal, &cfg).unwrap();
    assert!((swapped.endpoints[0] - v.endpoints[0]).norm().min((swapped.endpoints[1] - v.endpoints[0]).norm()) < 1e-9);
    let _ = HopfField::synthetic(&mesh, |_| c(1.0, 0.0)).unwrap();
}
