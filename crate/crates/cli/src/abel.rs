use crate::error::{CliError, CliResult};
use clap::Args;
use ergo_core::analysis::abel_transform;
use std::io::Write;
use std::path::PathBuf;

#[derive(Debug, Args)]
pub struct AbelArgs {
    /// The integrand: `const:C`, `power:P` (t^P), `sqrt`, or `table:FILE` (CSV `t,phi`, linearly interpolated).
    #[arg(long)]
    pub phi: String,
    /// Evaluation points; overrides --points/--x-max.
    #[arg(long, value_delimiter = ',')]
    pub x: Vec<f64>,
    /// Number of grid points x_i = x_max i / points.
    #[arg(long, default_value_t = 100)]
    pub points: usize,
    #[arg(long, default_value_t = 1.0)]
    pub x_max: f64,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

enum Phi {
    Const(f64),
    Power(f64),
    Table(Vec<(f64, f64)>),
}

impl Phi {
    fn parse(s: &str) -> CliResult<Phi> {
        let bad = |e: &dyn std::fmt::Display| CliError::Usage(format!("--phi `{s}`: {e}"));
        let (name, arg) = s.split_once(':').unwrap_or((s, ""));
        match name {
            "const" => Ok(Phi::Const(arg.parse().map_err(|e| bad(&e))?)),
            "power" => Ok(Phi::Power(arg.parse().map_err(|e| bad(&e))?)),
            "sqrt" => Ok(Phi::Power(0.5)),
            "table" => {
                let text = std::fs::read_to_string(arg).map_err(CliError::io(arg))?;
                let mut rows = Vec::new();
                for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
                    let mut it = line.split(',').map(|x| x.trim().parse::<f64>());
                    match (it.next(), it.next()) {
                        (Some(Ok(t)), Some(Ok(p))) => rows.push((t, p)),
                        _ if rows.is_empty() => continue, // header
                        _ => return Err(bad(&format!("unreadable row `{line}`"))),
                    }
                }
                if rows.len() < 2 || rows.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(bad(&"table needs at least two rows with increasing t"));
                }
                Ok(Phi::Table(rows))
            }
            _ => Err(bad(&"expected const:C, power:P, sqrt or table:FILE")),
        }
    }

    fn eval(&self, t: f64) -> f64 {
        match self {
            Phi::Const(c) => *c,
            Phi::Power(p) => t.max(0.0).powf(*p),
            Phi::Table(rows) => {
                let i = rows.partition_point(|r| r.0 <= t).clamp(1, rows.len() - 1);
                let ((t0, p0), (t1, p1)) = (rows[i - 1], rows[i]);
                p0 + (p1 - p0) * (t - t0) / (t1 - t0)
            }
        }
    }

    fn domain_max(&self) -> f64 {
        match self {
            Phi::Table(rows) => rows[rows.len() - 1].0,
            _ => f64::INFINITY,
        }
    }
}

pub fn run(a: AbelArgs) -> CliResult<()> {
    let phi = Phi::parse(&a.phi)?;
    let xs = if a.x.is_empty() {
        (1..=a.points).map(|i| a.x_max * i as f64 / a.points as f64).collect()
    } else {
        a.x.clone()
    };
    let mut out = String::from("# A[phi](x) = int_0^x phi(t) / sqrt(x - t) dt\nx,abel\n");
    for x in xs {
        if !(x > 0.0 && x <= phi.domain_max()) {
            return Err(CliError::Usage(format!("x = {x} is outside the domain of phi")));
        }
        let v = abel_transform(|t| phi.eval(t), x)?;
        out.push_str(&format!("{x},{v}\n"));
    }
    match &a.out {
        Some(p) => std::fs::write(p, out).map_err(CliError::io(p)),
        None => std::io::stdout().write_all(out.as_bytes()).map_err(CliError::io("<stdout>")),
    }
}
