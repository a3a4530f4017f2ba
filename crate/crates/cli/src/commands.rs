use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use spectune::bayes_opt::{BetaSchedule, BoConfig};
use spectune::kernel::Kernel;
use spectune::objective::{
    grid_oracle, project_volume, slice_scores, tune as run_tune, GridDomain, ObjectiveContext,
    OracleTable, TuningReport,
};
use spectune::tomo::{
    fbp_volume, jaszczak_spheres, shepp_logan, sphere_phantom, FilterParams, Sinogram, Volume,
};
use spectune::volume_io::{
    decode_volume, encode_pgm, encode_volume, meta_path, parse_key_values, sinograms_to_volume,
    volume_to_sinograms,
};

use crate::config::{PhantomKind, RunConfig};
use crate::{CliError, ExportArgs, FbpArgs, GridArgs, PhantomArgs, PiqueArgs, RadonArgs, TuneArgs};

type Result<T> = std::result::Result<T, CliError>;

fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

fn read_volume(path: &Path) -> Result<Volume> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    Ok(decode_volume(&bytes)?)
}

fn write_volume(path: &Path, volume: &Volume, meta: &[(&str, String)]) -> Result<()> {
    write_file(path, encode_volume(volume))?;
    let mut text = String::new();
    for (k, v) in meta {
        let _ = writeln!(text, "{k}={v}");
    }
    write_file(&meta_path(path), text)
}

/// Sidecar entries of a data file; empty when there is no sidecar.
fn read_sidecar(path: &Path) -> Result<Vec<(String, String)>> {
    let meta = meta_path(path);
    if !meta.exists() {
        return Ok(Vec::new());
    }
    let text = fs::read_to_string(&meta).map_err(|e| CliError::io(&meta, e))?;
    Ok(parse_key_values(&text)?)
}

/// Sinograms stored in `path` and the reconstruction size to use for them.
fn load_sinograms(path: &Path, size: Option<usize>) -> Result<(Vec<Sinogram>, usize)> {
    let sinos = volume_to_sinograms(&read_volume(path)?)?;
    let size = match size {
        Some(s) => s,
        None => {
            let recorded = read_sidecar(path)?
                .into_iter()
                .find(|(k, _)| k == "size")
                .map(|(_, v)| v);
            match recorded {
                Some(v) => v.parse().map_err(|_| {
                    CliError::usage(format!(
                        "sidecar of {} has an invalid size '{v}'",
                        path.display()
                    ))
                })?,
                None => {
                    return Err(CliError::usage(format!(
                        "no reconstruction size recorded for {}; pass --size",
                        path.display()
                    )))
                }
            }
        }
    };
    Ok((sinos, size))
}

fn build_phantom(kind: PhantomKind, size: usize, slices: usize) -> Result<Volume> {
    if slices == 0 {
        return Err(CliError::usage("slices must be positive"));
    }
    let volume = match kind {
        PhantomKind::SheppLogan => {
            let img = shepp_logan(size)?;
            Volume::from_slices(&vec![img; slices])?
        }
        PhantomKind::Spheres => sphere_phantom(size, slices, &jaszczak_spheres(size, slices), 1.0)?,
    };
    Ok(volume)
}

pub fn phantom(args: &PhantomArgs) -> Result<()> {
    let kind: PhantomKind = args.kind.parse()?;
    let volume = build_phantom(kind, args.size, args.slices)?;
    write_volume(
        &args.out,
        &volume,
        &[
            ("kind", "phantom".into()),
            ("phantom", kind.name().into()),
            ("size", args.size.to_string()),
            ("slices", args.slices.to_string()),
        ],
    )
}

pub fn radon(args: &RadonArgs) -> Result<()> {
    let volume = read_volume(&args.input)?;
    let (w, h, z) = volume.dims();
    if w != h {
        return Err(CliError::usage(format!(
            "radon needs square slices, got {w}x{h}"
        )));
    }
    let noise = args.noise_counts.map(|c| (c, args.seed));
    let sinos = project_volume(&volume, args.angles, noise)?;
    let mut meta = vec![
        ("kind", "sinogram".to_string()),
        ("size", w.to_string()),
        ("angles", args.angles.to_string()),
        ("slices", z.to_string()),
    ];
    if let Some(c) = args.noise_counts {
        meta.push(("noise_counts", c.to_string()));
        meta.push(("seed", args.seed.to_string()));
    }
    write_volume(&args.out, &sinograms_to_volume(&sinos)?, &meta)
}

pub fn fbp(args: &FbpArgs) -> Result<()> {
    let params = FilterParams::new(args.rho, args.omega0)?;
    let (sinos, size) = load_sinograms(&args.input, args.size)?;
    let volume = fbp_volume(&sinos, params, size)?;
    write_volume(
        &args.out,
        &volume,
        &[
            ("kind", "reconstruction".into()),
            ("rho", args.rho.to_string()),
            ("omega0", args.omega0.to_string()),
            ("size", size.to_string()),
            ("source", args.input.display().to_string()),
        ],
    )
}

/// `slice,pique` rows followed by a `mean` row.
fn pique_table(scores: &[f64]) -> String {
    let mut out = String::from("slice,pique\n");
    for (z, s) in scores.iter().enumerate() {
        let _ = writeln!(out, "{z},{s:.6}");
    }
    let mean = scores.iter().sum::<f64>() / scores.len() as f64;
    let _ = writeln!(out, "mean,{mean:.6}");
    out
}

pub fn pique(args: &PiqueArgs) -> Result<()> {
    let volume = read_volume(&args.input)?;
    let scores = slice_scores(&volume, &Default::default())?;
    let table = pique_table(&scores);
    print!("{table}");
    if let Some(path) = &args.csv {
        write_file(path, &table)?;
    }
    Ok(())
}

fn load_config(path: Option<&PathBuf>) -> Result<RunConfig> {
    match path {
        Some(p) => RunConfig::from_file(p),
        None => Ok(RunConfig::default()),
    }
}

/// Projection data for a run: a sinogram file, or the configured synthetic phantom.
fn run_data(input: Option<&PathBuf>, config: &RunConfig) -> Result<(Vec<Sinogram>, usize)> {
    match input {
        Some(path) => load_sinograms(path, config.size),
        None => {
            let volume = build_phantom(config.phantom, config.phantom_size, config.slices)?;
            let noise = (config.noise_counts > 0.0).then_some((config.noise_counts, config.seed));
            let sinos = project_volume(&volume, config.angles, noise)?;
            Ok((sinos, config.size.unwrap_or(config.phantom_size)))
        }
    }
}

fn landscape_csv(table: &OracleTable) -> String {
    let mut out = String::from("rho,omega0,pique\n");
    for (k, p) in table.pique.iter().enumerate() {
        let [rho, omega] = table.domain.point(k);
        let _ = writeln!(out, "{rho:.6},{omega:.6},{p:.6}");
    }
    out
}

fn trace_csv(report: &TuningReport, config: &RunConfig) -> String {
    let mut out = String::from("step,rho,omega0,pique,beta_m,schedule,init_preset\n");
    for e in &report.trace {
        let beta = e.beta.map(|b| format!("{b:.6}")).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{:.6},{:.6},{:.6},{},{},{}",
            e.step,
            e.rho,
            e.omega0,
            e.pique,
            beta,
            report.schedule.name(),
            config.init.name()
        );
    }
    out
}

fn summary_text(report: &TuningReport, config: &RunConfig, oracle: Option<&OracleTable>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "best_rho={:.6}", report.best_params.order());
    let _ = writeln!(
        out,
        "best_omega0={:.6}",
        report.best_params.critical_frequency()
    );
    let _ = writeln!(out, "best_pique={:.6}", report.best_pique);
    let _ = writeln!(out, "wall_time_s={:.3}", report.wall_time.as_secs_f64());
    let _ = writeln!(out, "schedule={}", report.schedule.name());
    let _ = writeln!(out, "init_preset={}", config.init.name());
    let _ = writeln!(out, "budget={}", config.budget);
    let _ = writeln!(out, "grid={}", config.grid);
    if let Some(table) = oracle {
        let best = table.best_params();
        let _ = writeln!(out, "oracle_m={}", table.domain.nodes_per_axis());
        let _ = writeln!(out, "oracle_best_rho={:.6}", best.order());
        let _ = writeln!(out, "oracle_best_omega0={:.6}", best.critical_frequency());
        let _ = writeln!(out, "oracle_best_pique={:.6}", table.best_pique());
        if let Some(r) = report.final_simple_regret() {
            let _ = writeln!(out, "final_simple_regret={r:.6}");
        }
    }
    out
}

pub fn tune(args: &TuneArgs) -> Result<()> {
    let mut config = load_config(args.config.as_ref())?;
    if let Some(s) = &args.schedule {
        config.apply("schedule", s)?;
    }
    if let Some(l) = args.lambda {
        config.lambda = l;
    }
    if let Some(i) = &args.init {
        config.apply("init", i)?;
    }
    if let Some(b) = args.budget {
        config.budget = b;
    }
    if let Some(g) = args.grid {
        config.grid = g;
    }
    if args.oracle.is_some() {
        config.oracle = args.oracle;
    }
    if args.size.is_some() {
        config.size = args.size;
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if args.out_dir.is_some() {
        config.out_dir = args.out_dir.clone();
    }
    config.validate()?;
    let out_dir = config
        .out_dir
        .clone()
        .ok_or_else(|| CliError::usage("an output directory is required (--out-dir)"))?;

    // Everything the optimizer needs is checked before any reconstruction.
    let domain = GridDomain::new(config.grid)?;
    let schedule = BetaSchedule::from_kind(config.schedule, config.lambda)?;
    let bo = BoConfig::new(
        Kernel::default(),
        schedule,
        &config.init.points(),
        config.budget,
        domain.candidate_grid(),
    )?;

    let (sinos, size) = run_data(args.input.as_ref(), &config)?;
    fs::create_dir_all(&out_dir).map_err(|e| CliError::io(&out_dir, e))?;

    let oracle = match config.oracle {
        Some(m) => {
            let ctx = ObjectiveContext::new(sinos.clone(), size, config.pique)?;
            let table = grid_oracle(&ctx, m)?;
            write_file(&out_dir.join("landscape.csv"), landscape_csv(&table))?;
            Some(table)
        }
        None => None,
    };

    let ctx = ObjectiveContext::new(sinos, size, config.pique)?;
    let report = run_tune(&ctx, &bo, oracle.as_ref())?;
    write_file(&out_dir.join("trace.csv"), trace_csv(&report, &config))?;
    write_file(
        &out_dir.join("summary.txt"),
        summary_text(&report, &config, oracle.as_ref()),
    )?;

    if args.save_recons {
        let dir = out_dir.join("recons");
        fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
        for (k, e) in report.trace.iter().enumerate() {
            let params = FilterParams::new(e.rho, e.omega0)?;
            let volume = ctx.reconstruct(params)?;
            write_volume(
                &dir.join(format!("recon_{:03}.spvol", k + 1)),
                &volume,
                &[
                    ("kind", "reconstruction".into()),
                    ("rho", e.rho.to_string()),
                    ("omega0", e.omega0.to_string()),
                    ("size", size.to_string()),
                    ("trace_row", (k + 1).to_string()),
                ],
            )?;
        }
    }

    println!(
        "best rho={:.6} omega0={:.6} pique={:.6}",
        report.best_params.order(),
        report.best_params.critical_frequency(),
        report.best_pique
    );
    Ok(())
}

pub fn grid(args: &GridArgs) -> Result<()> {
    let mut config = load_config(args.config.as_ref())?;
    if args.size.is_some() {
        config.size = args.size;
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    config.validate()?;
    GridDomain::new(args.m)?;
    let (sinos, size) = run_data(args.input.as_ref(), &config)?;
    let ctx = ObjectiveContext::new(sinos, size, config.pique)?;
    let table = grid_oracle(&ctx, args.m)?;
    write_file(&args.out, landscape_csv(&table))?;
    let best = table.best_params();
    println!(
        "best rho={:.6} omega0={:.6} pique={:.6}",
        best.order(),
        best.critical_frequency(),
        table.best_pique()
    );
    Ok(())
}

pub fn export(args: &ExportArgs) -> Result<()> {
    let volume = read_volume(&args.input)?;
    if args.slice >= volume.num_slices() {
        return Err(CliError::usage(format!(
            "slice {} out of range for a volume with {} slices",
            args.slice,
            volume.num_slices()
        )));
    }
    write_file(&args.out, encode_pgm(&volume.slice(args.slice)))
}
