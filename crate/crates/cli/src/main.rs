use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use telegrav::algebroid::{anholonomy_at, bracket_terms, structure_functions_at, Section};
use telegrav::harness::config::{load_tetrad, SuiteConfig, SuiteConfigFile};
use telegrav::harness::report::{emit_report, Format};
use telegrav::harness::run_suite;
use telegrav::telegeom::{christoffel_at, lagrangian_at, riemann_at, torsion_at, weitzenbock_at};
use telegrav::tetrad::{TetradField, CATALOG};
use telegrav::{Error, Result};

/// Teleparallel geometry of tetrad fields and numerical checks of its identities.
#[derive(Parser)]
#[command(name = "telegrav", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in tetrads and their parameters.
    Catalog,
    /// Print every tensor at one point as JSON.
    Analyze {
        /// Spec file or catalog reference `name[:key=value,...]`.
        spec: String,
        /// Comma-separated coordinates.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value_t = 1.0)]
        k: f64,
    },
    /// Run the identity suite.
    Check(CheckArgs),
    /// Frame components of the algebroid bracket, term by term.
    Bracket {
        spec: String,
        /// Comma-separated frame components of u (expressions).
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Dump a field along one coordinate line as CSV.
    Grid {
        spec: String,
        #[arg(long, value_enum)]
        field: GridField,
        /// Output file, `-` for standard output.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 50)]
        steps: usize,
        /// Coordinate to vary; the others sit at the domain midpoint.
        #[arg(long)]
        vary: Option<String>,
        #[arg(long, default_value_t = 1.0)]
        k: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GridField {
    Torsion,
    Lagrangian,
}

#[derive(Args)]
struct CheckArgs {
    /// Spec file or catalog reference; may instead come from --config.
    spec: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of sample points.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    tol_algebraic: Option<f64>,
    #[arg(long)]
    tol_differential: Option<f64>,
    #[arg(long)]
    tol_divergence: Option<f64>,
    /// Per-check or per-class tolerance, `NAME=VALUE`; repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tol: Vec<String>,
    /// Comma-separated check names (default: all).
    #[arg(long, value_delimiter = ',')]
    checks: Option<Vec<String>>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// json, csv or text.
    #[arg(long)]
    format: Option<String>,
    /// Expect the vacuum checks to fail on this tetrad.
    #[arg(long)]
    non_vacuum: bool,
    /// Evaluate points one at a time.
    #[arg(long)]
    serial: bool,
    #[arg(long)]
    k: Option<f64>,
}

fn parse_list(text: &str) -> Vec<String> {
    text.split(',').map(|s| s.trim().to_string()).collect()
}

fn parse_point(text: &str, t: &TetradField) -> Result<Vec<f64>> {
    let x = parse_list(text)
        .iter()
        .map(|s| s.parse::<f64>().map_err(|_| Error::InvalidArgument(format!("`{s}` is not a number"))))
        .collect::<Result<Vec<_>>>()?;
    if x.len() != t.dim() {
        return Err(Error::InvalidArgument(format!("point needs {} coordinates, got {}", t.dim(), x.len())));
    }
    Ok(x)
}

fn nested(shape: &[usize], flat: &[f64]) -> Value {
    match shape.split_first() {
        None => json!(flat[0]),
        Some((n, rest)) => {
            let stride: usize = rest.iter().product();
            Value::Array((0..*n).map(|i| nested(rest, &flat[i * stride..(i + 1) * stride])).collect())
        }
    }
}

macro_rules! arr {
    ($a:expr) => {{
        let a = &$a;
        nested(a.shape(), &a.iter().copied().collect::<Vec<f64>>())
    }};
}

fn analyze(spec: &str, point: &str, k: f64) -> Result<Value> {
    let t = load_tetrad(spec)?;
    let x = parse_point(point, &t)?;
    let fd = t.frame_data_at(&x)?;
    let w = weitzenbock_at(&fd);
    let td = torsion_at(&fd);
    let lc = christoffel_at(&fd)?;
    let curv = riemann_at(&lc, &fd);
    let sf = structure_functions_at(&fd, &td);
    Ok(json!({
        "tetrad": t.name(),
        "coords": t.chart().coord_names(),
        "point": x,
        "h": arr!(fd.h),
        "h_inv": arr!(fd.h_inv),
        "det_h": fd.det_h,
        "metric": arr!(fd.g),
        "metric_inv": arr!(fd.g_inv),
        "weitzenbock": arr!(w.gamma),
        "torsion_coord": arr!(td.t_coord),
        "torsion_frame": arr!(td.t_frame),
        "contortion": arr!(td.contortion),
        "superpotential": arr!(td.superpotential),
        "christoffel": arr!(lc.gamma),
        "riemann": arr!(curv.riemann),
        "ricci": arr!(curv.ricci),
        "ricci_scalar": curv.scalar,
        "einstein": curv.einstein.as_ref().map(|g| arr!(g)),
        "lagrangian": lagrangian_at(&fd, k)?,
        "structure_functions": arr!(sf.tc),
        "anholonomy": arr!(anholonomy_at(&fd)),
    }))
}

fn check(args: &CheckArgs) -> Result<(Vec<u8>, Option<PathBuf>, bool)> {
    let file = match &args.config {
        Some(p) => SuiteConfigFile::from_json(&fs::read_to_string(p)?)?,
        None => SuiteConfigFile::from_json("{}")?,
    };
    let tetrad = args.spec.as_deref().map(load_tetrad).transpose()?;
    if tetrad.is_none() && file.tetrad.is_none() {
        return Err(Error::InvalidArgument("no tetrad given (positional spec or --config)".into()));
    }
    let mut cfg = SuiteConfig::from_file(&file, tetrad)?;
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(n) = args.n {
        cfg.n_points = n;
    }
    if let Some(list) = &args.checks {
        cfg.checks = list.iter().map(|c| c.trim().parse()).collect::<Result<_>>()?;
    }
    for (class, tol) in [
        ("algebraic", args.tol_algebraic),
        ("differential", args.tol_differential),
        ("divergence", args.tol_divergence),
    ] {
        if let Some(v) = tol {
            cfg.set_tolerance(class, v)?;
        }
    }
    for item in &args.tol {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| Error::InvalidArgument(format!("--tol expects NAME=VALUE, got `{item}`")))?;
        let v = value.trim().parse::<f64>().map_err(|_| Error::InvalidArgument(format!("bad tolerance `{value}`")))?;
        cfg.set_tolerance(name.trim(), v)?;
    }
    cfg.non_vacuum |= args.non_vacuum;
    cfg.parallel = !args.serial;
    if let Some(k) = args.k {
        cfg.k = k;
    }
    cfg.validate()?;

    // stdout defaults to text, files to json, a config output block to its own format
    let out = args.out.clone().or_else(|| file.output.as_ref().and_then(|o| o.path.clone().map(PathBuf::from)));
    let format = match (&args.format, &file.output) {
        (Some(f), _) => f.parse()?,
        (None, Some(o)) => o.format,
        (None, None) if out.is_some() => Format::Json,
        (None, None) => Format::Text,
    };
    let report = run_suite(&cfg)?;
    Ok((emit_report(&report, format)?, out, report.pass))
}

fn bracket(spec: &str, u: &str, v: &str, point: &str) -> Result<String> {
    let t = load_tetrad(spec)?;
    let x = parse_point(point, &t)?;
    let section = |s: &str| -> Result<Section> {
        let parts = parse_list(s);
        Section::parse(&parts.iter().map(String::as_str).collect::<Vec<_>>(), t.chart(), t.params())
    };
    let (u, v) = (section(u)?, section(v)?);
    let fd = t.frame_data_at(&x)?;
    let sf = structure_functions_at(&fd, &torsion_at(&fd));
    let terms = bracket_terms(&u, &v, &fd, &sf)?;
    let mut s = String::new();
    s.push_str("[u,v]^c = -u^a v^b T^c_ab + u^a h_a(v^c) - v^a h_a(u^c)\n");
    s.push_str(&format!("{:>3} {:>16} {:>16} {:>16} {:>16}\n", "c", "structure", "u.grad v", "-v.grad u", "total"));
    for c in 0..t.dim() {
        s.push_str(&format!(
            "{:>3} {:>16.9e} {:>16.9e} {:>16.9e} {:>16.9e}\n",
            c, terms.structure[c], terms.u_derivative[c], terms.v_derivative[c], terms.total[c]
        ));
    }
    Ok(s)
}

fn grid(spec: &str, field: GridField, steps: usize, vary: Option<&str>, k: f64) -> Result<String> {
    let t = load_tetrad(spec)?;
    if steps < 2 {
        return Err(Error::InvalidArgument("--steps must be at least 2".into()));
    }
    let axis = match vary {
        Some(name) => t
            .chart()
            .coord_index(name)
            .ok_or_else(|| Error::InvalidArgument(format!("no coordinate `{name}` in this chart")))?,
        None => 1.min(t.dim() - 1),
    };
    let domain = t.domain_or_default();
    let [lo, hi] = domain.bounds()[axis];
    let base = domain.midpoint();
    let n = t.dim();
    let names = t.chart().coord_names();
    let mut header = vec![names[axis].clone()];
    match field {
        GridField::Lagrangian => header.push("lagrangian".into()),
        GridField::Torsion => {
            for r in 0..n {
                for m in 0..n {
                    for v in (m + 1)..n {
                        header.push(format!("T^{}_{}{}", names[r], names[m], names[v]));
                    }
                }
            }
        }
    }
    let mut out = header.join(",");
    out.push('\n');
    for i in 0..steps {
        // interior points only: the box edges may be singular
        let s = lo + (hi - lo) * (i as f64 + 0.5) / steps as f64;
        let mut x = base.clone();
        x[axis] = s;
        let fd = t.frame_data_at(&x)?;
        let mut row = vec![format!("{s:e}")];
        match field {
            GridField::Lagrangian => row.push(format!("{:e}", lagrangian_at(&fd, k)?)),
            GridField::Torsion => {
                let td = torsion_at(&fd);
                for r in 0..n {
                    for m in 0..n {
                        for v in (m + 1)..n {
                            row.push(format!("{:e}", td.t_coord[[r, m, v]]));
                        }
                    }
                }
            }
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    Ok(out)
}

fn catalog_text() -> String {
    let mut s = String::new();
    for e in CATALOG {
        s.push_str(&format!("{}\n  {}\n", e.name, e.description));
        for (p, d) in e.params {
            s.push_str(&format!("  param {p}: {d}\n"));
        }
        if !e.example.is_empty() {
            let ex: Vec<String> = e.example.iter().map(|(k, v)| format!("{k}={v}")).collect();
            s.push_str(&format!("  example: {}:{}\n", e.name, ex.join(",")));
        }
    }
    s
}

fn write_output(bytes: &[u8], out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(p) if p.as_os_str() != "-" => fs::write(p, bytes)?,
        _ => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Catalog => write_output(catalog_text().as_bytes(), None)?,
        Command::Analyze { spec, point, k } => {
            let mut text = serde_json::to_string_pretty(&analyze(&spec, &point, k)?)?;
            text.push('\n');
            write_output(text.as_bytes(), None)?;
        }
        Command::Check(args) => {
            let (bytes, out, pass) = check(&args)?;
            write_output(&bytes, out.as_ref())?;
            if !pass {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Bracket { spec, u, v, point } => write_output(bracket(&spec, &u, &v, &point)?.as_bytes(), None)?,
        Command::Grid { spec, field, out, steps, vary, k } => {
            let text = grid(&spec, field, steps, vary.as_deref(), k)?;
            write_output(text.as_bytes(), Some(&out))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
