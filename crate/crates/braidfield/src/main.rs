use braidfield::braid::BraidWord;
use braidfield::config::Config;
use braidfield::crossings::{assign_signs, find_crossings, g_data_points};
use braidfield::diagram::f_data_points;
use braidfield::error::{Error, Result};
use braidfield::interp::lagrange_trig_interpolate;
use braidfield::json::fmt_f64;
use braidfield::pipeline::x_interpolants;
use braidfield::project::{
    integerize, inverse_stereographic, split_real_imag, stereographic_project,
};
use braidfield::semiholo::{assemble, degree_bounds, FourierBraid, FourierComponent, SemiholoPoly};
use braidfield::verify::{find_lambda, sample_nodal_set, verified_polynomial};
use clap::{Args, Parser, Subcommand};
use std::fs;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "braidfield",
    about = "Braid words to semiholomorphic polynomials with verified knotted zero sets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct the polynomial for a braid word
    Build(BuildArgs),
    /// Certify that the zero set on the three-sphere is the braid closure
    Verify(VerifyArgs),
    /// Project the verified polynomial stereographically to R^3
    Project(ProjectArgs),
    /// Sample the nodal curve into a CSV point cloud
    Trace(TraceArgs),
    /// Analyze a braid word
    Info(InfoArgs),
}

#[derive(Args, Clone)]
struct BraidInput {
    /// Braid word tokens, e.g. "2 -1 2 1 1 1"
    #[arg(long, allow_hyphen_values = true)]
    braid: Option<String>,
    /// JSON file {"strands": s, "word": [...]}
    #[arg(long)]
    braid_file: Option<PathBuf>,
    /// Strand count (required for the trivial word, optional otherwise)
    #[arg(long)]
    strands: Option<usize>,
}

impl BraidInput {
    fn parse(&self) -> Result<BraidWord> {
        match (&self.braid, &self.braid_file) {
            (Some(text), None) => BraidWord::parse(text, self.strands),
            (None, Some(path)) => BraidWord::from_json(&fs::read_to_string(path)?),
            _ => Err(Error::InvalidInput(
                "provide exactly one of --braid or --braid-file".into(),
            )),
        }
    }

    fn given(&self) -> bool {
        self.braid.is_some() || self.braid_file.is_some()
    }
}

#[derive(Args, Clone)]
struct ConfigArgs {
    /// Relative pruning and cancellation tolerance
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Crossing-scan density multiplier
    #[arg(long, default_value_t = 4096)]
    grid: usize,
    /// Verification samples around the circle
    #[arg(long, default_value_t = 512)]
    samples: usize,
    /// Fixed amplitude instead of the halving search
    #[arg(long)]
    lambda: Option<f64>,
    /// Repeat the braid r times before closing
    #[arg(long, default_value_t = 1)]
    repeat: u32,
    /// Seed for randomized checks
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl ConfigArgs {
    fn config(&self) -> Result<Config> {
        let cfg = Config {
            tol: self.tol,
            grid: self.grid,
            samples: self.samples,
            lambda: self.lambda,
            seed: self.seed,
            repeat: self.repeat,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    braid: BraidInput,
    #[command(flatten)]
    config: ConfigArgs,
    /// Output path for the polynomial JSON (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the x-interpolation data points as CSV
    #[arg(long)]
    dump_fdata: Option<PathBuf>,
    /// Write the detected crossings as CSV
    #[arg(long)]
    dump_crossings: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    braid: BraidInput,
    /// Polynomial JSON produced by `build`
    #[arg(long)]
    poly: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArgs,
    /// Output path for the report JSON (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ProjectArgs {
    #[command(flatten)]
    braid: BraidInput,
    /// Polynomial JSON produced by `build`
    #[arg(long)]
    poly: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArgs,
    /// Round to Gaussian-integer coefficients within the margin budget
    #[arg(long)]
    integerize: bool,
    /// Output path for the projected polynomial JSON (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write F1 and F2 in readable form
    #[arg(long)]
    dump_text: Option<PathBuf>,
}

#[derive(Args)]
struct TraceArgs {
    #[command(flatten)]
    braid: BraidInput,
    /// Polynomial JSON produced by `build`
    #[arg(long)]
    poly: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArgs,
    /// Project the cloud to R^3 (3 columns instead of 4)
    #[arg(long)]
    projected: bool,
    /// Output CSV path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InfoArgs {
    #[command(flatten)]
    braid: BraidInput,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, content)?,
        None => println!("{content}"),
    }
    Ok(())
}

fn load_polynomial(
    braid: &BraidInput,
    poly: &Option<PathBuf>,
    cfg: &Config,
) -> Result<(SemiholoPoly, Option<BraidWord>, Option<FourierBraid>)> {
    match poly {
        Some(path) => {
            let f = SemiholoPoly::from_json(&fs::read_to_string(path)?)?;
            Ok((f, None, None))
        }
        None => {
            if !braid.given() {
                return Err(Error::InvalidInput(
                    "provide --poly or a braid input".into(),
                ));
            }
            let word = braid.parse()?;
            let fb = braidfield::fourier_parametrisation(&word, cfg)?;
            let f = assemble(&fb, cfg.tol)?;
            Ok((f, Some(word), Some(fb)))
        }
    }
}

fn cmd_build(args: &BuildArgs) -> Result<()> {
    let word = args.braid.parse()?;
    let cfg = args.config.config()?;
    let comps = word.components();
    let xs = x_interpolants(&word, &cfg)?;

    if let Some(path) = &args.dump_fdata {
        let mut csv = String::from("component,k,t,x\n");
        for c in 0..comps.count() {
            for (k, (t, x)) in f_data_points(&word, &comps, c).iter().enumerate() {
                csv.push_str(&format!("{c},{k},{},{}\n", fmt_f64(*t), fmt_f64(*x)));
            }
        }
        fs::write(path, csv)?;
    }

    let ys = if word.is_trivial() {
        vec![braidfield::TrigPoly::zero(); comps.count()]
    } else {
        let crossings = find_crossings(&xs, &comps, word.len(), cfg.grid)?;
        if let Some(path) = &args.dump_crossings {
            let mut csv = String::from("t0,component_a,offset_a,component_b,offset_b,interval,transverse\n");
            for c in &crossings {
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    fmt_f64(c.t0),
                    c.a.component,
                    c.a.offset,
                    c.b.component,
                    c.b.offset,
                    c.interval,
                    c.transverse
                ));
            }
            fs::write(path, csv)?;
        }
        let chart = word.position_chart();
        let signs = assign_signs(&word, &crossings, &chart, &comps);
        let data = g_data_points(&crossings, &signs, &comps)?;
        data.iter()
            .map(|points| {
                if points.is_empty() {
                    Ok(braidfield::TrigPoly::zero())
                } else {
                    Ok(lagrange_trig_interpolate(points, None)?.prune(cfg.tol))
                }
            })
            .collect::<Result<Vec<_>>>()?
    };

    let components = comps
        .cycles
        .iter()
        .map(|cycle| FourierComponent {
            x: xs[cycle.label].clone(),
            y: ys[cycle.label].clone(),
            strands: cycle.len(),
        })
        .collect();
    let mut fb = FourierBraid::new(components);
    fb.lambda = cfg.lambda.unwrap_or(1.0);
    fb.repeat = cfg.repeat;
    fb.braid = Some(word.clone());
    let f = assemble(&fb, cfg.tol)?;

    let (c1, c2) = degree_bounds(&word);
    let summary = format!(
        "degree={} c1={} c2={} beta={} harmonic={}",
        f.degree(),
        fmt_f64(c1),
        c2,
        word.beta(),
        f.is_harmonic()
    );
    emit(&args.out, &f.to_json())?;
    if args.out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(())
}

fn cmd_verify(args: &VerifyArgs) -> Result<()> {
    let cfg = args.config.config()?;
    let (f, word, fb) = load_polynomial(&args.braid, &args.poly, &cfg)?;
    let report = find_lambda(&f, &cfg, word.as_ref(), fb.as_ref())?;
    emit(&args.out, &report.to_json())?;
    if !report.passed {
        return Err(Error::VerificationFailure(
            report
                .first_failing_stage
                .unwrap_or_else(|| "lambda-search".into()),
        ));
    }
    Ok(())
}

fn cmd_project(args: &ProjectArgs) -> Result<()> {
    let cfg = args.config.config()?;
    let (f_raw, word, fb) = load_polynomial(&args.braid, &args.poly, &cfg)?;
    let (f, report) = verified_polynomial(&f_raw, &cfg, word.as_ref(), fb.as_ref())?;
    let projected = stereographic_project(&f);
    let final_poly = if args.integerize {
        let nodal = sample_nodal_set(&f, cfg.samples.min(256))?;
        let samples3: Vec<[f64; 3]> = nodal
            .iter()
            .filter_map(|&p| inverse_stereographic(p))
            .collect();
        let (rounded, scale) = integerize(
            &projected,
            report.transversality_margin,
            &samples3,
            1_000_000_000,
        )?;
        // re-verify: the rounded polynomial still vanishes on a fresh nodal sample
        let fresh = sample_nodal_set(&f, cfg.samples.min(256) + 17)?;
        let deg = f.degree() as i32;
        let f_scale = f.scale().max(1.0);
        for p in fresh {
            if let Some([x, y, z]) = inverse_stereographic(p) {
                let den = (x * x + y * y + z * z + 1.0).powi(deg);
                let allowed = scale as f64
                    * (1e-8 * f_scale * den + 0.2 * report.transversality_margin);
                if rounded.eval(x, y, z).norm() > allowed {
                    return Err(Error::IntegerizeFailure(scale));
                }
            }
        }
        eprintln!("integerized with scale {scale}");
        rounded
    } else {
        projected
    };
    if let Some(path) = &args.dump_text {
        let (f1, f2) = split_real_imag(&final_poly);
        fs::write(path, format!("F1 = {}\nF2 = {}\n", f1.to_text(), f2.to_text()))?;
    }
    emit(&args.out, &final_poly.to_json())?;
    let line = format!("degree={} lambda={}", final_poly.degree(), fmt_f64(report.lambda));
    if args.out.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
    Ok(())
}

fn cmd_trace(args: &TraceArgs) -> Result<()> {
    let cfg = args.config.config()?;
    let (f_raw, word, fb) = load_polynomial(&args.braid, &args.poly, &cfg)?;
    let (f, _report) = verified_polynomial(&f_raw, &cfg, word.as_ref(), fb.as_ref())?;
    let points = sample_nodal_set(&f, cfg.samples)?;
    let mut csv = String::new();
    if args.projected {
        csv.push_str("x,y,z\n");
        for p in points {
            if let Some([x, y, z]) = inverse_stereographic(p) {
                csv.push_str(&format!("{},{},{}\n", fmt_f64(x), fmt_f64(y), fmt_f64(z)));
            }
        }
    } else {
        csv.push_str("u_re,u_im,v_re,v_im\n");
        for p in points {
            csv.push_str(&format!(
                "{},{},{},{}\n",
                fmt_f64(p[0]),
                fmt_f64(p[1]),
                fmt_f64(p[2]),
                fmt_f64(p[3])
            ));
        }
    }
    emit(&args.out, csv.trim_end())?;
    Ok(())
}

fn cmd_info(args: &InfoArgs) -> Result<()> {
    let word = args.braid.parse()?;
    let comps = word.components();
    let (c1, c2) = degree_bounds(&word);
    let cycles: Vec<String> = comps
        .cycles
        .iter()
        .map(|c| {
            format!(
                "[{}]",
                c.strands
                    .iter()
                    .map(|s| s.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            )
        })
        .collect();
    let perm: Vec<String> = comps.permutation.iter().map(|p| p.to_string()).collect();
    let json = format!(
        concat!(
            "{{\"strands\":{},\"length\":{},\"exponent_sum\":{},\"beta\":{},",
            "\"strictly_homogeneous\":{},\"components\":[{}],\"permutation\":[{}],",
            "\"c1\":{},\"c2\":{}}}"
        ),
        word.strands(),
        word.len(),
        word.exponent_sum(),
        word.beta(),
        word.is_strictly_homogeneous(),
        cycles.join(","),
        perm.join(","),
        fmt_f64(c1),
        c2
    );
    emit(&args.out, &json)
}

fn main() {
    if let Ok(threads) = std::env::var("BRAIDFIELD_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global();
        }
    }
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Build(args) => cmd_build(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Project(args) => cmd_project(args),
        Command::Trace(args) => cmd_trace(args),
        Command::Info(args) => cmd_info(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
