use crate::count::Count;
use crate::error::{CliError, CliResult};
use crate::manifest::{out_dir, read_json, write_json, Manifest};
use crate::resolve_seed;
use clap::{Args, Subcommand};
use ergo_core::altwalk::{self, AltState, EllipseGeom};
use ergo_core::analysis::{Axis, Histogram};
use ergo_core::diskstrip::{self, lambda2_chart_sample, BodyParams, Velocity};
use ergo_core::kernels1d::{cosine_conjugate, hat, AngleKernel, KernelSpec};
use ergo_core::parallel::Runner;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

const ENERGY_DRIFT_LIMIT: f64 = 1e-9;

#[derive(Debug, Subcommand)]
pub enum System {
    /// Alternating walk on the ellipse E*, driven by a kernel on (0, pi).
    Altwalk(AltwalkArgs),
    /// Velocity chain of the rough disk between two parallel walls.
    Diskstrip(DiskArgs),
}

pub fn run(system: System) -> CliResult<()> {
    match system {
        System::Altwalk(a) => altwalk(a),
        System::Diskstrip(a) => diskstrip(a),
    }
}

/// Geometry and run parameters; every field may also come from `--config`.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AltwalkConfig {
    /// Ellipse angle gamma in radians.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// Ellipse angle as a fraction of pi.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_over_pi: Option<f64>,
    /// Disk mass; with --j, gamma is derived from the body.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    /// Disk moment of inertia.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<f64>,
    /// Angle kernel, e.g. `circ_arc:0.5`, `rect_teeth:1`, `quadrant_cx` or JSON.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel: Option<String>,
    /// Recorded steps per chain.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<Count>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub burn_in: Option<Count>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_chains: Option<Count>,
    /// Random seed; falls back to the ERGO_SEED environment variable
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Occupancy bins per coordinate axis.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bins: Option<usize>,
    /// Output directory.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl AltwalkConfig {
    /// Fill unset fields from `base`; flags win.
    fn over(self, base: AltwalkConfig) -> AltwalkConfig {
        AltwalkConfig {
            gamma: self.gamma.or(base.gamma),
            gamma_over_pi: self.gamma_over_pi.or(base.gamma_over_pi),
            m: self.m.or(base.m),
            j: self.j.or(base.j),
            kernel: self.kernel.or(base.kernel),
            n: self.n.or(base.n),
            burn_in: self.burn_in.or(base.burn_in),
            n_chains: self.n_chains.or(base.n_chains),
            seed: self.seed.or(base.seed),
            bins: self.bins.or(base.bins),
            out: self.out.or(base.out),
        }
    }
}

#[derive(Debug, Args)]
pub struct AltwalkArgs {
    /// JSON file with any of the flag fields; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub flags: AltwalkConfig,
    /// Skip writing the trajectory CSV.
    #[arg(long)]
    pub no_trajectory: bool,
}

fn ellipse(c: &AltwalkConfig) -> CliResult<EllipseGeom> {
    match (c.gamma, c.gamma_over_pi, c.m, c.j) {
        (Some(g), None, None, None) => Ok(EllipseGeom::new(g)?),
        (None, Some(r), None, None) => Ok(EllipseGeom::from_gamma_over_pi(r)?),
        (None, None, Some(m), Some(j)) => Ok(*BodyParams::new(m, j)?.geom()),
        _ => Err(CliError::Usage("give exactly one of --gamma, --gamma-over-pi or the pair --m/--j".into())),
    }
}

fn parse_kernel(s: &str) -> CliResult<AngleKernel> {
    Ok(s.parse::<KernelSpec>()?.build()?)
}

fn csv_writer(path: &Path) -> CliResult<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(CliError::io(path))?))
}

struct Chain {
    occupancy: Histogram,
    states: Option<Vec<AltState>>,
}

fn altwalk(args: AltwalkArgs) -> CliResult<()> {
    let file = match &args.config {
        Some(p) => read_json::<AltwalkConfig>(p)?,
        None => AltwalkConfig::default(),
    };
    let c = args.flags.over(file);
    let geom = ellipse(&c)?;
    let kernel_text = c.kernel.clone().ok_or_else(|| CliError::Usage("--kernel is required".into()))?;
    let q_hat = hat(cosine_conjugate(parse_kernel(&kernel_text)?));
    let seed = resolve_seed(c.seed)?;
    let n = c.n.unwrap_or(Count(1_000_000)).0;
    let burn = c.burn_in.unwrap_or(Count(0)).0;
    let chains = c.n_chains.unwrap_or(Count(1)).0.max(1);
    let bins = c.bins.unwrap_or(32).max(1);
    let dir = out_dir(c.out.as_deref().unwrap_or(Path::new(".")))?;

    let b = geom.coord_bound();
    let axes = vec![Axis::new(-b, b, bins)?, Axis::new(-b, b, bins)?, Axis::new(-2.0, 2.0, 2)?];
    let template = Histogram::new(axes)?;
    let keep = !args.no_trajectory;
    let runner = Runner::new(seed);
    let results = runner.map_indexed(chains, |rng, i| -> CliResult<Chain> {
        let mut st = geom.sample_m2(rng);
        for _ in 0..burn {
            st = geom.step(&q_hat, st, rng)?;
        }
        let mut occupancy = template.clone();
        let mut states = (keep && i == 0).then(|| Vec::with_capacity(n + 1));
        for k in 0..=n {
            if k > 0 {
                st = geom.step(&q_hat, st, rng)?;
            }
            if !geom.contains(st.u, st.v) {
                return Err(CliError::Invariant(format!("chain {i} left the ellipse at step {k}: {st:?}")));
            }
            occupancy.add(&[st.u, st.v, st.s.value()]);
            if let Some(v) = states.as_mut() {
                v.push(st);
            }
        }
        Ok(Chain { occupancy, states })
    });
    let mut occupancy = template;
    let mut trajectory = None;
    for r in results {
        let chain = r?;
        occupancy.merge(&chain.occupancy)?;
        trajectory = trajectory.or(chain.states);
    }

    let mut outputs = serde_json::Map::new();
    if let Some(states) = trajectory {
        let path = dir.join("trajectory.csv");
        let mut w = csv_writer(&path)?;
        altwalk::write_csv(&mut w, &states).and_then(|_| w.flush()).map_err(CliError::io(&path))?;
        outputs.insert(
            "trajectory.csv".into(),
            json!("chain 0 after burn-in; step counts recorded steps, (u, v) are oblique ellipse coordinates (dimensionless), s in {-1, 1} is the side of the last step"),
        );
    }
    write_json(
        &dir.join("occupancy.json"),
        &json!({ "axes": ["u", "v", "s"], "chains": chains, "histogram": occupancy }),
    )?;
    outputs.insert(
        "occupancy.json".into(),
        json!("visit counts on a (u, v, s) grid, row-major with s fastest; s bins are [-2, 0) and [0, 2); all chains merged in chain order"),
    );
    let (a, bb) = geom.axes_lengths();
    let derived = json!({
        "gamma": geom.gamma(),
        "gamma_over_pi": geom.gamma() / std::f64::consts::PI,
        "axes": [a, bb],
        "area": geom.area(),
        "seed": seed,
    });
    let config = serde_json::to_value(&c).expect("config serializes");
    write_json(&dir.join("manifest.json"), &Manifest::new("simulate altwalk", config, derived, outputs.into()))
}

#[derive(Debug, Args, Serialize)]
pub struct DiskArgs {
    #[arg(long)]
    pub m: f64,
    #[arg(long)]
    pub j: f64,
    /// Angle kernel spec, or `no_slip` / `smooth` for the deterministic walls.
    #[arg(long)]
    pub kernel: String,
    /// Number of collisions.
    #[arg(long, default_value = "1e5")]
    pub n: Count,
    /// Random seed; falls back to the ERGO_SEED environment variable
    #[arg(long)]
    pub seed: Option<u64>,
    /// Start in chart coordinates (theta, psi); sampled from Lambda^2 if omitted.
    #[arg(long, requires = "psi")]
    pub theta: Option<f64>,
    #[arg(long, requires = "theta")]
    pub psi: Option<f64>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

enum Wall {
    Random(AngleKernel),
    NoSlip,
    Smooth,
}

fn diskstrip(args: DiskArgs) -> CliResult<()> {
    let body = BodyParams::new(args.m, args.j)?;
    let wall = match args.kernel.as_str() {
        "no_slip" => Wall::NoSlip,
        "smooth" => Wall::Smooth,
        s => Wall::Random(parse_kernel(s)?),
    };
    let seed = resolve_seed(args.seed)?;
    let mut rng = Runner::new(seed).rng(0);
    let v0 = match (args.theta, args.psi) {
        (Some(t), Some(p)) => body.chart(t, p),
        _ => {
            let (t, p) = lambda2_chart_sample(&mut rng);
            body.chart(t, p)
        }
    };
    let mut vs: Vec<Velocity> = Vec::with_capacity(args.n.0 + 1);
    vs.push(v0);
    let mut v = v0;
    let mut drift: f64 = 0.0;
    for k in 1..=args.n.0 {
        v = match &wall {
            Wall::Random(p) => body.k_step(p, v, &mut rng)?,
            Wall::NoSlip => body.k_noslip(v)?,
            Wall::Smooth => body.k_smooth(v),
        };
        drift = drift.max((body.energy(v) - 1.0).abs());
        if drift > ENERGY_DRIFT_LIMIT {
            return Err(CliError::Invariant(format!("energy drift {drift:e} after {k} collisions")));
        }
        vs.push(v);
    }
    let dir = out_dir(&args.out)?;
    let path = dir.join("trajectory.csv");
    let mut w = csv_writer(&path)?;
    diskstrip::write_csv(&mut w, &vs).and_then(|_| w.flush()).map_err(CliError::io(&path))?;
    let [chi, n1, n2] = body.frame();
    let (a, b) = body.geom().axes_lengths();
    let derived = json!({
        "gamma": body.gamma(),
        "gamma_over_pi": body.gamma() / std::f64::consts::PI,
        "axes": [a, b],
        "frame": { "chi": chi.0, "n1": n1.0, "n2": n2.0 },
        "max_energy_drift": drift,
        "seed": seed,
    });
    let outputs = json!({
        "trajectory.csv": "velocity (v0, v1, v2) = (angular velocity, wall-tangent velocity, wall-normal velocity) after each collision, step 0 is the start; kinetic energy (J v0^2 + m v1^2 + m v2^2)/2 is normalised to 1",
    });
    let config = serde_json::to_value(&args).expect("args serialize");
    write_json(&dir.join("manifest.json"), &Manifest::new("simulate diskstrip", config, derived, outputs))
}
