use crate::count::Count;
use crate::error::{CliError, CliResult};
use crate::manifest::{out_dir, read_json, sha256_hex, write_json, Manifest};
use crate::resolve_seed;
use clap::Args;
use ergo_core::kernels1d::{ArcParams, TeethParams};
use ergo_core::microstructure::{
    attach_nubs, build_circular_arc, build_elliptic_arc, build_rect_teeth, flat, foreshorten, foreshortening_factor,
    space_averaged_kernel, NubProfile, NubShape, WallProfile,
};
use ergo_core::parallel::Runner;
use serde::Serialize;
use serde_json::json;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

const WALL_HELP: &str =
    "wall JSON file, or a built-in: flat, rect_teeth:R, circ_arc:XI, elliptic_arc:XI:LAMBDA";

/// A wall read from a file or built from a shorthand.
pub fn load_wall(spec: &str) -> CliResult<WallProfile> {
    let path = Path::new(spec);
    if path.exists() {
        let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
        return Ok(WallProfile::from_json(&text)?);
    }
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |i: usize| -> CliResult<f64> {
        parts
            .get(i)
            .ok_or_else(|| CliError::Usage(format!("wall `{spec}` is missing a parameter ({WALL_HELP})")))?
            .parse()
            .map_err(|e| CliError::Usage(format!("wall `{spec}`: {e}")))
    };
    let wall = match (parts[0], parts.len()) {
        ("flat", 1) => flat(),
        ("rect_teeth", 2) => build_rect_teeth(TeethParams::new(num(1)?)?)?,
        ("circ_arc", 2) => build_circular_arc(ArcParams::new(num(1)?)?)?,
        ("elliptic_arc", 3) => build_elliptic_arc(ArcParams::new(num(1)?)?, num(2)?)?,
        _ => return Err(CliError::Usage(format!("`{spec}` is neither a file nor a built-in wall ({WALL_HELP})"))),
    };
    Ok(wall)
}

pub fn wall_hash(wall: &WallProfile) -> String {
    sha256_hex(&serde_json::to_vec(wall).expect("wall serializes"))
}

const WALL_JSON: &str = "one period of the wall, normalised to period 1; x along the wall, y <= 0 below the reference line";

#[derive(Debug, Args, Serialize)]
pub struct DeriveKernel {
    #[arg(long, help = WALL_HELP)]
    pub wall: String,
    /// Number of incoming angles, at the midpoints of a uniform grid on (0, pi).
    #[arg(long, default_value_t = 64)]
    pub theta_grid: usize,
    #[arg(long, default_value = "1e5")]
    pub n_per_theta: Count,
    /// Exit-angle histogram bins on [0, pi].
    #[arg(long, default_value_t = 64)]
    pub bins: usize,
    /// Random seed; falls back to the ERGO_SEED environment variable
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct AtomOut {
    theta: f64,
    location: f64,
    weight: f64,
}

#[derive(Serialize)]
struct KernelFile {
    theta_grid: Vec<f64>,
    bins: Vec<f64>,
    atoms: Vec<AtomOut>,
    counts: Vec<Vec<u64>>,
    n_per_theta: usize,
    singular: Vec<usize>,
}

pub fn derive_kernel(a: DeriveKernel) -> CliResult<()> {
    if a.theta_grid == 0 || a.bins == 0 || a.n_per_theta.0 == 0 {
        return Err(CliError::Usage("--theta-grid, --bins and --n-per-theta must be positive".into()));
    }
    let wall = load_wall(&a.wall)?;
    let seed = resolve_seed(a.seed)?;
    let runner = Runner::new(seed);
    let grid: Vec<f64> = (0..a.theta_grid).map(|i| PI * (i as f64 + 0.5) / a.theta_grid as f64).collect();
    let mut file = KernelFile {
        theta_grid: grid.clone(),
        bins: vec![],
        atoms: vec![],
        counts: vec![],
        n_per_theta: a.n_per_theta.0,
        singular: vec![],
    };
    for (i, theta) in grid.iter().enumerate() {
        let row = space_averaged_kernel(&wall, *theta, a.n_per_theta.0, a.bins, &runner.derive(i as u64))?;
        file.atoms.extend(row.atoms.iter().map(|at| AtomOut { theta: *theta, location: at.location, weight: at.weight }));
        file.bins = row.bins;
        file.counts.push(row.counts);
        file.singular.push(row.singular);
    }
    let dir = out_dir(&a.out)?;
    write_json(&dir.join("kernel.json"), &file)?;
    let outputs = json!({
        "kernel.json": "theta_grid: incoming angles (radians, from the +x axis); bins: exit-angle bin edges (radians); counts[i]: exit-angle histogram for theta_grid[i]; atoms: exit angles carrying at least 1e-3 of the mass, tagged with their incoming angle; singular: redrawn corner or grazing hits per row",
    });
    let mut m = Manifest::new("derive-kernel", serde_json::to_value(&a).expect("args serialize"), json!({ "seed": seed }), outputs);
    m.wall_sha256 = Some(wall_hash(&wall));
    write_json(&dir.join("manifest.json"), &m)
}

#[derive(Debug, Args, Serialize)]
pub struct Foreshorten {
    #[arg(long, help = WALL_HELP)]
    pub wall: String,
    #[arg(long)]
    pub m: f64,
    #[arg(long)]
    pub j: f64,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

pub fn run_foreshorten(a: Foreshorten) -> CliResult<()> {
    let wall = load_wall(&a.wall)?;
    let lambda = foreshortening_factor(a.m, a.j)?;
    let out = foreshorten(&wall, a.m, a.j)?;
    let dir = out_dir(&a.out)?;
    write_json(&dir.join("wall.json"), &out)?;
    let derived = json!({ "lambda": lambda, "input_wall_sha256": wall_hash(&wall) });
    let mut m = Manifest::new(
        "foreshorten",
        serde_json::to_value(&a).expect("args serialize"),
        derived,
        json!({ "wall.json": WALL_JSON }),
    );
    m.wall_sha256 = Some(wall_hash(&out));
    write_json(&dir.join("manifest.json"), &m)
}

#[derive(Debug, Args, Serialize)]
pub struct AttachNubs {
    #[arg(long, help = WALL_HELP)]
    pub wall: String,
    /// Nub half-width.
    #[arg(long)]
    pub delta: f64,
    /// Circular-cap radius (default 2 delta).
    #[arg(long, conflicts_with_all = ["curvature", "nub"])]
    pub radius: Option<f64>,
    /// Parabolic cap h(u) = -curvature u^2 / 2 instead of a circular one.
    #[arg(long, conflicts_with = "nub")]
    pub curvature: Option<f64>,
    /// Nub profile JSON file; overrides --delta.
    #[arg(long)]
    pub nub: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

pub fn run_attach_nubs(a: AttachNubs) -> CliResult<()> {
    let wall = load_wall(&a.wall)?;
    let nub = match (&a.nub, a.radius, a.curvature) {
        (Some(p), _, _) => read_json::<NubProfile>(p)?,
        (None, r, None) => NubProfile::circular(a.delta, r.unwrap_or(2.0 * a.delta))?,
        (None, None, Some(k)) => NubProfile::new(a.delta, NubShape::Parabolic { curvature: k })?,
        (None, Some(_), Some(_)) => return Err(CliError::Usage("give at most one of --radius and --curvature".into())),
    };
    let out = attach_nubs(&wall, &nub)?;
    let dir = out_dir(&a.out)?;
    write_json(&dir.join("wall.json"), &out)?;
    let derived = json!({ "nub": nub, "foot_height": nub.foot(), "input_wall_sha256": wall_hash(&wall) });
    let mut m = Manifest::new(
        "attach-nubs",
        serde_json::to_value(&a).expect("args serialize"),
        derived,
        json!({ "wall.json": WALL_JSON }),
    );
    m.wall_sha256 = Some(wall_hash(&out));
    write_json(&dir.join("manifest.json"), &m)
}
