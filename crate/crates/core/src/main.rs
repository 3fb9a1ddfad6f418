use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use hopflab::boundary::{sample_boundary, BoundarySpec};
use hopflab::cli::{run, Analysis, BoundarySource, MapSource, SceneConfig};
use hopflab::energy::{minimize_admissible, MinimizerOutcome, Preconditioner, SolverConfig};
use hopflab::mesh::MeshId;
use hopflab::topology::{capacity, capacity_blowup_profile, disk_plate};
use hopflab::{Error, Result, UnitDiskMesh};

#[derive(Parser)]
#[command(name = "hopflab", version, about = "Discrete monotone Sobolev maps on the unit disk")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct MeshArg {
    /// Mesh as RINGS,SECTORS.
    #[arg(long, default_value = "24,6", value_parser = parse_mesh)]
    mesh: MeshId,
}

#[derive(Subcommand)]
enum Command {
    /// Run every analysis listed in a scene file.
    Run {
        scene: PathBuf,
        /// Overrides the scene's output directory.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Minimize the penalized energy for a boundary map.
    Minimize {
        #[arg(long, conflicts_with = "gallery", required_unless_present = "gallery")]
        boundary: Option<PathBuf>,
        #[arg(long)]
        gallery: Option<String>,
        #[command(flatten)]
        mesh: MeshArg,
        #[arg(long)]
        out: PathBuf,
        /// Solver settings as JSON.
        #[arg(long)]
        solver: Option<PathBuf>,
        #[arg(long, value_parser = parse_preconditioner)]
        preconditioner: Option<Preconditioner>,
    },
    /// Analyse a gallery map sampled on the mesh.
    Gallery {
        #[arg(long)]
        name: String,
        /// Comma-separated list of analyses.
        #[arg(long, value_delimiter = ',', default_value = "energy,hopf")]
        analyses: Vec<Analysis>,
        #[command(flatten)]
        mesh: MeshArg,
        /// Use the harmonic extension of the boundary values instead of the map.
        #[arg(long)]
        harmonic: bool,
        #[arg(long, default_value = "hopflab-out")]
        output_dir: PathBuf,
        /// Monotonicity grid, N or NxN.
        #[arg(long, value_parser = parse_grid)]
        grid: Option<usize>,
        #[arg(long)]
        fiber_radius: Option<f64>,
    },
    /// Conformal capacity of a disk or a real segment in the unit disk.
    Capacity {
        #[arg(long, conflicts_with = "segment", required_unless_present = "segment")]
        disk_r: Option<f64>,
        /// A,EPS[,EPS...]: plates [A, 1-EPS].
        #[arg(long, value_delimiter = ',')]
        segment: Option<Vec<f64>>,
        #[command(flatten)]
        mesh: MeshArg,
    },
    /// Build a mesh and print its statistics, optionally saving it.
    Mesh {
        #[command(flatten)]
        mesh: MeshArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_mesh(s: &str) -> std::result::Result<MeshId, String> {
    let (r, sct) = s.split_once(',').ok_or("expected RINGS,SECTORS")?;
    let rings = r.trim().parse().map_err(|e| format!("rings: {e}"))?;
    let sectors = sct.trim().parse().map_err(|e| format!("sectors: {e}"))?;
    Ok(MeshId { rings, sectors })
}

fn parse_grid(s: &str) -> std::result::Result<usize, String> {
    let n = match s.split_once(['x', 'X']) {
        Some((a, b)) if a == b => a,
        Some(_) => return Err("only square grids are supported".into()),
        None => s,
    };
    n.parse().map_err(|e| format!("grid: {e}"))
}

fn parse_preconditioner(s: &str) -> std::result::Result<Preconditioner, String> {
    serde_json::from_value(json!(s)).map_err(|_| format!("unknown preconditioner `{s}`"))
}

fn configure_threads() {
    if let Some(n) = std::env::var("HOPFLAB_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("could not size thread pool: {e}");
        }
    }
}

fn print_json(v: &serde_json::Value) {
    use std::io::Write;
    // A closed pipe downstream is not an error worth reporting.
    let _ = writeln!(std::io::stdout().lock(), "{}", serde_json::to_string_pretty(v).expect("json value"));
}

/// Ok(true) means success, Ok(false) a missed tolerance.
fn execute(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Run { scene, output_dir } => {
            let mut config = SceneConfig::load(&scene)?;
            if let Some(dir) = output_dir {
                config.output_dir = dir;
            }
            let base = scene.parent().unwrap_or(Path::new("."));
            let report = run(&config, base)?;
            print_json(&report.without_timing());
            Ok(report.ok())
        }
        Command::Minimize { boundary, gallery, mesh, out, solver, preconditioner } => {
            let spec = match (boundary, gallery) {
                (Some(path), _) => BoundarySpec::load(&path)?,
                (None, Some(name)) => BoundarySpec::gallery(name.parse()?)?,
                (None, None) => unreachable!("clap enforces one boundary source"),
            };
            let mut config = match solver {
                Some(path) => {
                    let text = std::fs::read_to_string(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                    serde_json::from_str(&text)?
                }
                None => SolverConfig::default(),
            };
            if let Some(p) = preconditioner {
                config.preconditioner = p;
            }
            config.validate()?;
            let mesh = UnitDiskMesh::build(mesh.mesh.rings, mesh.mesh.sectors)?;
            spec.validate()?;
            let values = sample_boundary(&spec, &mesh)?;
            let result = minimize_admissible(&values, &mesh, &config)?;
            let text = serde_json::to_string_pretty(&result)?;
            std::fs::write(&out, text + "\n").map_err(|e| Error::Io(format!("{}: {e}", out.display())))?;
            print_json(&json!({
                "outcome": result.outcome,
                "converged": result.converged,
                "iterations": result.iterations,
                "dirichlet": result.breakdown.dirichlet,
                "min_jacobian": result.breakdown.min_jacobian,
                "negative_jacobian_mass": result.breakdown.negative_jacobian_mass,
            }));
            Ok(result.outcome == MinimizerOutcome::Feasible)
        }
        Command::Gallery { name, analyses, mesh, harmonic, output_dir, grid, fiber_radius } => {
            let mut config = SceneConfig {
                mesh: mesh.mesh,
                boundary: BoundarySource::Name(name),
                map: if harmonic { MapSource::Harmonic } else { MapSource::Gallery },
                solver: SolverConfig::default(),
                analyses,
                output_dir,
                settings: Default::default(),
            };
            if let Some(n) = grid {
                config.settings.grid = n;
            }
            config.settings.fiber_radius = fiber_radius;
            let report = run(&config, Path::new("."))?;
            print_json(&report.without_timing());
            Ok(report.ok())
        }
        Command::Capacity { disk_r, segment, mesh } => {
            let mesh = UnitDiskMesh::build(mesh.mesh.rings, mesh.mesh.sectors)?;
            match (disk_r, segment) {
                (Some(r), _) => {
                    let cap = capacity(&mesh, &disk_plate(&mesh, r))?;
                    print_json(&json!({
                        "disk_radius": r,
                        "capacity": cap,
                        "continuum": 2.0 * std::f64::consts::PI / (1.0 / r).ln(),
                    }));
                }
                (None, Some(seg)) => {
                    let (a, eps) = seg
                        .split_first()
                        .filter(|(_, e)| !e.is_empty())
                        .ok_or_else(|| Error::InvalidArgument("--segment needs A,EPS[,EPS...]".into()))?;
                    let caps = capacity_blowup_profile(&mesh, *a, eps)?;
                    print_json(&json!({ "a": a, "eps": eps, "capacities": caps }));
                }
                (None, None) => unreachable!("clap enforces one plate"),
            }
            Ok(true)
        }
        Command::Mesh { mesh, out } => {
            let mesh = UnitDiskMesh::build(mesh.mesh.rings, mesh.mesh.sectors)?;
            if let Some(path) = out {
                std::fs::write(&path, mesh.to_text()).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            }
            print_json(&json!({
                "rings": mesh.rings,
                "sectors": mesh.sectors,
                "vertices": mesh.vertex_count(),
                "triangles": mesh.triangle_count(),
                "median_diameter": mesh.median_diameter(),
                "boundary_spacing": mesh.boundary_spacing(),
            }));
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    configure_threads();
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("hopflab: {e}");
            ExitCode::from(2)
        }
    }
}
