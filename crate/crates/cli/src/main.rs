mod config;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use casimir::analytic::RoughnessSpec;
use casimir::dielectric::{DielectricModel, ScSubModel};
use casimir::lifshitz::{Geometry, QuadratureConfig};
use casimir::metrology::{
    config_hash, format_value, generate_curve, interval_sensitivity, sc_delta_sweep,
    separation_grid, synth_data, CurveSpec, FitConfig, MeasuredSeries, NormalModel, Provenance,
};
use casimir::model_spec::{parse_frequency, parse_grid, parse_model};
use casimir::superconductor::{SuperconductorParams, BCS_GAP_RATIO};
use clap::{Args, Parser, Subcommand, ValueEnum};

const AFTER_HELP: &str = "\
Environment:
  CASIMIR_REL_TOL  default relative quadrature tolerance (overridden by --rel-tol)

Config files hold one `key=value` per line (`#` comments), using the long flag
names without dashes. Flags given on the command line override the file.

Exit status: 0 success, 2 usage error, 1 computation or i/o error. Errors are
reported on stderr as `error[<category>]: <message>`.";

#[derive(Parser, Debug)]
#[command(name = "casimir", version, about = "Casimir forces between real metals", after_help = AFTER_HELP)]
struct Cli {
    /// Read defaults from a key=value file
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Permittivity on the imaginary frequency axis
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Eps(EpsArgs),
    /// Force (sphere-plate) or pressure (plate-plate) over a separation grid
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Curve(CurveArgs),
    /// Plate-plate pressure over a separation grid
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Pressure(PressureArgs),
    /// Fit the separation offset of a measured series
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Fit(FitArgs),
    /// Pressure change across the superconducting transition
    #[command(name = "sweep-sc", args_override_self = true, allow_negative_numbers = true)]
    SweepSc(SweepArgs),
    /// Synthetic measured series from a theory curve
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Synth(SynthArgs),
}

#[derive(Args, Debug, Clone)]
struct QuadArgs {
    /// Relative quadrature tolerance
    #[arg(long, env = "CASIMIR_REL_TOL", default_value_t = 1e-9)]
    rel_tol: f64,
    /// Matsubara term limit
    #[arg(long, default_value_t = 20_000)]
    max_terms: usize,
    /// Largest a/R accepted by the proximity-force approximation
    #[arg(long, default_value_t = 0.05)]
    pfa_limit: f64,
}

impl QuadArgs {
    fn config(&self) -> Result<QuadratureConfig<f64>, Failure> {
        let q = QuadratureConfig {
            rel_tol: self.rel_tol,
            max_matsubara_terms: self.max_terms,
            pfa_limit: self.pfa_limit,
            ..QuadratureConfig::default()
        };
        q.validate().map_err(Failure::usage)?;
        Ok(q)
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum GeometryKind {
    SpherePlate,
    PlatePlate,
}

#[derive(Args, Debug, Clone)]
struct TheoryArgs {
    #[arg(long, value_enum, default_value = "sphere-plate")]
    geometry: GeometryKind,
    /// Sphere radius, m
    #[arg(long = "R", default_value_t = 55e-6)]
    radius: f64,
    /// Sphere (or first plate) model, e.g. drude:wp=9.0eV,gamma=0.02eV
    #[arg(long, default_value = "drude:wp=9.0eV,gamma=0.02eV")]
    sphere: String,
    /// Plate model
    #[arg(long, default_value = "drude:wp=9.0eV,gamma=0.035eV")]
    plate: String,
    /// Temperature, K
    #[arg(long = "T", default_value_t = 300.0)]
    t: f64,
    /// Rms roughness of sphere and plate, m: `s1,s2`
    #[arg(long)]
    roughness: Option<String>,
    #[command(flatten)]
    quad: QuadArgs,
}

impl TheoryArgs {
    fn spec(&self) -> Result<CurveSpec<f64>, Failure> {
        let geometry = match self.geometry {
            GeometryKind::SpherePlate => Geometry::SpherePlate { radius: self.radius },
            GeometryKind::PlatePlate => Geometry::PlatePlate,
        };
        geometry.validate().map_err(Failure::usage)?;
        build_spec(geometry, &self.sphere, &self.plate, self.t, self.roughness.as_deref(), &self.quad)
    }
}

fn build_spec(
    geometry: Geometry<f64>,
    m1: &str,
    m2: &str,
    t: f64,
    roughness: Option<&str>,
    quad: &QuadArgs,
) -> Result<CurveSpec<f64>, Failure> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Failure::Usage(format!("temperature must be >= 0, got {t}")));
    }
    Ok(CurveSpec {
        geometry,
        sphere: parse_model(m1, None).map_err(Failure::usage)?,
        plate: parse_model(m2, None).map_err(Failure::usage)?,
        t,
        roughness: roughness.map(parse_roughness).transpose()?,
        quadrature: quad.config()?,
    })
}

#[derive(Args, Debug)]
struct EpsArgs {
    /// Model spec
    #[arg(long)]
    model: String,
    /// Imaginary frequency: a value (eV suffix allowed) or min:max:count:lin|log in rad/s
    #[arg(long)]
    xi: String,
    /// Temperature, K (superconductors)
    #[arg(long = "T", default_value_t = 300.0)]
    t: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CurveArgs {
    #[command(flatten)]
    theory: TheoryArgs,
    /// Separations, m: min:max:count:lin|log or one value
    #[arg(long)]
    a: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PressureArgs {
    /// First plate model
    #[arg(long, default_value = "drude:wp=9.0eV,gamma=0.035eV")]
    model1: String,
    /// Second plate model (defaults to the first)
    #[arg(long)]
    model2: Option<String>,
    #[arg(long = "T", default_value_t = 300.0)]
    t: f64,
    #[arg(long)]
    roughness: Option<String>,
    #[arg(long)]
    a: String,
    #[command(flatten)]
    quad: QuadArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FitArgs {
    /// Measured series (z_m,f_N,sigma_N)
    #[arg(long)]
    data: PathBuf,
    #[command(flatten)]
    theory: TheoryArgs,
    /// Offset search range, m: `lo,hi`
    #[arg(long, allow_hyphen_values = true)]
    bracket: String,
    /// Separation windows, m: `lo:hi[,lo:hi...]`
    #[arg(long)]
    interval: String,
    /// Offset used to place the data in the windows, m
    #[arg(long, default_value_t = 0.0)]
    reference_offset: f64,
    /// Theory points cached for interpolation; 0 evaluates directly
    #[arg(long, default_value_t = 200)]
    cache_points: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ScKind {
    Mb,
    Plasma,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum NormalKind {
    Drude,
    Plasma,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Plate separation, m
    #[arg(long)]
    a: f64,
    /// Critical temperature, K
    #[arg(long, default_value_t = 1.3)]
    tc: f64,
    #[arg(long, default_value = "11.5eV")]
    wp: String,
    #[arg(long, default_value = "0.05eV")]
    gamma: String,
    /// Gap ratio Delta(0)/(k_B T_c)
    #[arg(long, default_value_t = BCS_GAP_RATIO)]
    ratio: f64,
    #[arg(long, value_enum, default_value = "mb")]
    model: ScKind,
    /// Normal-state baseline
    #[arg(long, value_enum, default_value = "drude")]
    normal: NormalKind,
    /// Temperatures as fractions of T_c, comma separated
    #[arg(long, default_value = "1.0,0.9,0.7,0.5,0.3,0.2")]
    t: String,
    #[command(flatten)]
    quad: QuadArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[command(flatten)]
    theory: TheoryArgs,
    /// True separations, m
    #[arg(long)]
    a: String,
    /// True offset, m (z = a - a0)
    #[arg(long, default_value_t = 0.0)]
    a0: f64,
    /// Gaussian noise rms, N (or Pa)
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Computation(String),
    Io(String),
}

impl Failure {
    fn usage(e: impl std::fmt::Display) -> Self {
        Self::Usage(e.to_string())
    }

    fn comp(e: impl std::fmt::Display) -> Self {
        Self::Computation(e.to_string())
    }

    fn report(&self) -> ExitCode {
        let (cat, msg, code) = match self {
            Self::Usage(m) => ("usage", m, 2),
            Self::Computation(m) => ("computation", m, 1),
            Self::Io(m) => ("io", m, 1),
        };
        eprintln!("error[{cat}]: {msg}");
        ExitCode::from(code)
    }
}

fn num(s: &str, what: &str) -> Result<f64, Failure> {
    s.trim()
        .parse()
        .map_err(|_| Failure::Usage(format!("bad number `{s}` in {what}")))
}

fn pair(s: &str, sep: char, what: &str) -> Result<(f64, f64), Failure> {
    let (a, b) = s
        .split_once(sep)
        .ok_or_else(|| Failure::Usage(format!("{what} needs two values separated by `{sep}`")))?;
    Ok((num(a, what)?, num(b, what)?))
}

fn parse_roughness(s: &str) -> Result<RoughnessSpec<f64>, Failure> {
    let (a, b) = pair(s, ',', "roughness")?;
    RoughnessSpec::new(a, b).map_err(Failure::usage)
}

fn header(prov: &Provenance) -> String {
    format!("# provenance: {}\n# {}\n", prov.hash(), prov.canonical())
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_eps(a: EpsArgs) -> Result<(), Failure> {
    let model = parse_model(&a.model, None).map_err(Failure::usage)?;
    let xis = if a.xi.contains(':') {
        parse_grid(&a.xi).map_err(Failure::usage)?
    } else {
        vec![parse_frequency(&a.xi).map_err(Failure::usage)?]
    };
    if xis.iter().any(|&x| !(x > 0.0)) {
        return Err(Failure::Usage("xi must be positive".into()));
    }
    let canonical = format!("eps;model={model};t={:e};xi={}", a.t, a.xi);
    let mut s = format!("# provenance: {}\n# {canonical}\nxi_rad_s,eps\n", config_hash(&canonical));
    for xi in xis {
        let e = model.eps_imag_axis(xi, a.t).map_err(Failure::comp)?;
        let _ = writeln!(s, "{},{}", format_value(xi), format_value(e));
    }
    emit(a.out.as_ref(), &s)
}

fn run_curve(spec: &CurveSpec<f64>, grid: &str, out: Option<&PathBuf>) -> Result<(), Failure> {
    let grid = parse_grid(grid).map_err(Failure::usage)?;
    let curve = generate_curve(spec, &grid).map_err(Failure::comp)?;
    emit(out, &curve.to_csv())
}

fn run_pressure(a: PressureArgs) -> Result<(), Failure> {
    let m2 = a.model2.as_deref().unwrap_or(&a.model1);
    let spec = build_spec(Geometry::PlatePlate, &a.model1, m2, a.t, a.roughness.as_deref(), &a.quad)?;
    run_curve(&spec, &a.a, a.out.as_ref())
}

fn run_fit(a: FitArgs) -> Result<(), Failure> {
    let spec = a.theory.spec()?;
    let text = std::fs::read_to_string(&a.data).map_err(|e| Failure::Io(format!("{}: {e}", a.data.display())))?;
    let data = MeasuredSeries::from_csv(&text).map_err(Failure::usage)?;
    let bracket = pair(&a.bracket, ',', "bracket")?;
    let intervals = a
        .interval
        .split(',')
        .map(|iv| pair(iv, ':', "interval"))
        .collect::<Result<Vec<_>, _>>()?;
    let mut cfg = FitConfig::new(bracket, intervals[0]);
    cfg.reference_offset = a.reference_offset;

    let used: Vec<f64> = data
        .points()
        .iter()
        .map(|p| p.z)
        .filter(|z| intervals.iter().any(|iv| (iv.0..=iv.1).contains(&(z + a.reference_offset))))
        .collect();
    if used.is_empty() {
        return Err(Failure::Usage("no data points fall inside the fit intervals".into()));
    }
    let lo = used[0] + bracket.0;
    let hi = used[used.len() - 1] + bracket.1;
    if !(lo > 0.0) {
        return Err(Failure::Usage(format!("bracket reaches non-positive separation {lo:e} m")));
    }
    let sens = if a.cache_points >= 2 {
        let grid = separation_grid(lo, hi, a.cache_points, true).map_err(Failure::usage)?;
        let curve = generate_curve(&spec, &grid).map_err(Failure::comp)?;
        interval_sensitivity(&data, |x| curve.interpolate(x), &cfg, &intervals)
    } else {
        interval_sensitivity(&data, |x| spec.evaluate(x), &cfg, &intervals)
    }
    .map_err(Failure::comp)?;

    let mut prov = spec.provenance();
    prov.extra = vec![
        ("command".into(), "fit".into()),
        ("data".into(), config_hash(&text)),
        ("bracket".into(), a.bracket.clone()),
        ("interval".into(), a.interval.clone()),
        ("reference_offset".into(), format!("{:e}", a.reference_offset)),
        ("cache_points".into(), a.cache_points.to_string()),
    ];
    let mut s = header(&prov);
    s.push_str("interval_min_m,interval_max_m,a0_m,rms,n_points\n");
    for r in &sens.results {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            format_value(r.interval.0),
            format_value(r.interval.1),
            format_value(r.a0),
            format_value(r.rms),
            r.n_points
        );
    }
    let _ = writeln!(s, "# spread_m: {}", format_value(sens.spread));
    emit(a.out.as_ref(), &s)
}

fn run_sweep(a: SweepArgs) -> Result<(), Failure> {
    let wp = parse_frequency(&a.wp).map_err(Failure::usage)?;
    let gamma = parse_frequency(&a.gamma).map_err(Failure::usage)?;
    let params = SuperconductorParams::with_gap_ratio(wp, gamma, a.tc, a.ratio).map_err(Failure::usage)?;
    let fractions = a
        .t
        .split(',')
        .map(|f| num(f, "temperature list"))
        .collect::<Result<Vec<_>, _>>()?;
    let temps: Vec<f64> = fractions.iter().map(|f| f * a.tc).collect();
    let q = a.quad.config()?;
    let (sub, sub_name) = match a.model {
        ScKind::Mb => (ScSubModel::MattisBardeen, "mb"),
        ScKind::Plasma => (ScSubModel::PlasmaBelowTc, "plasma"),
    };
    let (normal, normal_name) = match a.normal {
        NormalKind::Drude => (NormalModel::Drude, "drude"),
        NormalKind::Plasma => (NormalModel::Plasma, "plasma"),
    };
    let pts = sc_delta_sweep(a.a, &params, sub, normal, &temps, &q).map_err(Failure::comp)?;
    let model = DielectricModel::Superconductor { params, sub_model: sub };
    let prov = Provenance {
        geometry: "plate-plate".into(),
        sphere: model.to_string(),
        plate: model.to_string(),
        t: a.tc,
        roughness: None,
        quadrature: casimir::metrology::quadrature_tag(&q),
        extra: vec![
            ("command".into(), "sweep-sc".into()),
            ("a".into(), format!("{:e}", a.a)),
            ("model".into(), sub_name.into()),
            ("normal".into(), normal_name.into()),
            ("t_fractions".into(), a.t.clone()),
        ],
    };
    let mut s = header(&prov);
    s.push_str("t_K,delta_p_Pa,p_normal_Pa\n");
    for p in pts {
        let _ = writeln!(s, "{},{},{}", format_value(p.t), format_value(p.delta_p), format_value(p.p_normal));
    }
    emit(a.out.as_ref(), &s)
}

fn run_synth(a: SynthArgs) -> Result<(), Failure> {
    let spec = a.theory.spec()?;
    let grid = parse_grid(&a.a).map_err(Failure::usage)?;
    let curve = generate_curve(&spec, &grid).map_err(Failure::comp)?;
    let lookup = |x: f64| {
        let i = grid.iter().position(|&g| g == x).expect("grid point");
        Ok(curve.points()[i].1)
    };
    let data = synth_data(lookup, &grid, a.a0, a.noise, a.seed).map_err(Failure::comp)?;
    let mut prov = spec.provenance();
    prov.extra = vec![
        ("command".into(), "synth".into()),
        ("a".into(), a.a.clone()),
        ("a0".into(), format!("{:e}", a.a0)),
        ("noise".into(), format!("{:e}", a.noise)),
        ("seed".into(), a.seed.to_string()),
    ];
    let mut s = header(&prov);
    s.push_str(&data.to_csv());
    emit(a.out.as_ref(), &s)
}

fn run(args: Vec<OsString>) -> Result<(), Failure> {
    let args = match config::config_path(&args) {
        Some(p) => {
            let text = std::fs::read_to_string(&p).map_err(|e| Failure::Usage(format!("config {}: {e}", p.display())))?;
            let extra = config::file_args(&text, &p).map_err(Failure::Usage)?;
            config::splice(args, extra)
        }
        None => args,
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return Ok(());
            }
            let msg = e.render().to_string();
            let msg = msg.trim().strip_prefix("error: ").unwrap_or(msg.trim()).to_string();
            return Err(Failure::Usage(msg));
        }
    };
    match cli.cmd {
        Cmd::Eps(a) => run_eps(a),
        Cmd::Curve(a) => run_curve(&a.theory.spec()?, &a.a, a.out.as_ref()),
        Cmd::Pressure(a) => run_pressure(a),
        Cmd::Fit(a) => run_fit(a),
        Cmd::SweepSc(a) => run_sweep(a),
        Cmd::Synth(a) => run_synth(a),
    }
}

fn main() -> ExitCode {
    match run(std::env::args_os().collect()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.report(),
    }
}
