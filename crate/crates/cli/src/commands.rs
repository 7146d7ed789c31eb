use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use ultraspec::certify::{run_suite, CertInstance, CheckSet, SuiteOptions};
use ultraspec::complexes::{
    hodge_density, hodge_operator, lattice_cover, parse_complex, sobolev_ratio, twisted_blocks, AbelianCoverSpec,
};
use ultraspec::continuum::{exponent_readoff, symbol_density, PolynomialSymbol, SamplingDomain};
use ultraspec::csv_io::{read_matrix, step_to_csv, step_with_errors_to_csv};
use ultraspec::monocalc::{asymptotic_fit, OrliczProfile, StepFunction};
use ultraspec::report::CertificationReport;
use ultraspec::seeds::sub_seed;
use ultraspec::spectral_ops::{
    cayley_laplacian, decompose, spectral_density_from, torus_blocks, torus_laplacian, OperatorInstance, DENSE_CAP,
};

use crate::config::{DomainConfig, InstanceSpec, RunConfig};
use crate::error::{CliError, Result};
use crate::output::{ext, opt, write_csv};

/// A loaded config with its command-line overrides applied.
#[derive(Clone, Debug)]
pub struct Context {
    pub config: RunConfig,
    /// Directory that relative paths in the config resolve against.
    pub base_dir: PathBuf,
    pub out_dir: PathBuf,
    pub seed: u64,
}

impl Context {
    pub fn new(config: RunConfig, base_dir: PathBuf, out: Option<PathBuf>, seed: Option<u64>) -> Self {
        let out_dir = out.unwrap_or_else(|| base_dir.join(&config.output));
        let seed = seed.unwrap_or(config.seed);
        Context { config, base_dir, out_dir, seed }
    }

    fn instance(&self) -> Result<&InstanceSpec> {
        self.config.instance.as_ref().ok_or_else(|| CliError::Config("this command needs an \"instance\"".into()))
    }

    fn csv(&self, name: &str, body: &str) -> Result<PathBuf> {
        write_csv(&self.out_dir, name, self.seed, body)
    }
}

fn instance_name(spec: &InstanceSpec) -> String {
    let stem = |p: &Path| p.file_stem().map_or("file".into(), |s| s.to_string_lossy().into_owned());
    match spec {
        InstanceSpec::Cycle { n } => format!("cycle-{n}"),
        InstanceSpec::Torus { d, n } => format!("torus-{d}d-{n}"),
        InstanceSpec::CayleyTable { table, .. } => format!("cayley-{}", table.len()),
        InstanceSpec::ComplexFile { path, degree, n, .. } => format!("{}-k{degree}-n{n}", stem(path)),
        InstanceSpec::MatrixFile { path, .. } => stem(path),
    }
}

fn cover_from_file(ctx: &Context, spec: &InstanceSpec, n: usize) -> Result<AbelianCoverSpec> {
    let InstanceSpec::ComplexFile { path, rank, labels, auto_complete, .. } = spec else {
        unreachable!("called with a complex-file instance")
    };
    let full = ctx.base_dir.join(path);
    let text = std::fs::read_to_string(&full).map_err(|e| CliError::Io { path: full.clone(), source: e })?;
    let input = |e| CliError::Input { path: full.clone(), source: e };
    let file = parse_complex(&text, *auto_complete).map_err(input)?;
    let edges = file.complex.count(1);
    let labels = match (labels, file.labels) {
        (Some(l), _) => l.clone(),
        (None, Some(l)) => l,
        (None, None) => vec![vec![0; rank.unwrap_or(1)]; edges],
    };
    let r = labels.first().map_or(rank.unwrap_or(1), Vec::len);
    if rank.is_some_and(|k| k != r) {
        return Err(CliError::Config(format!("rank {} disagrees with label length {r}", rank.unwrap())));
    }
    AbelianCoverSpec::new(file.complex, labels, r, n).map_err(input)
}

fn dense_operator(ctx: &Context, spec: &InstanceSpec) -> Result<OperatorInstance> {
    Ok(match spec {
        InstanceSpec::Cycle { n } => dense_torus(1, *n)?,
        InstanceSpec::Torus { d, n } => dense_torus(*d, *n)?,
        InstanceSpec::CayleyTable { table, generators } => {
            OperatorInstance::new(cayley_laplacian(table, generators)?, true, 1)?
        }
        InstanceSpec::ComplexFile { degree, n, .. } => hodge_operator(&cover_from_file(ctx, spec, *n)?, *degree)?,
        InstanceSpec::MatrixFile { path, invariant, fiber } => {
            let full = ctx.base_dir.join(path);
            let m = read_matrix(&full).map_err(|e| CliError::Input { path: full.clone(), source: e })?;
            OperatorInstance::new(m, *invariant, *fiber).map_err(|e| CliError::Input { path: full, source: e })?
        }
    })
}

fn dense_torus(d: usize, n: usize) -> Result<OperatorInstance> {
    let dim = n.checked_pow(d as u32).unwrap_or(usize::MAX);
    if dim > DENSE_CAP {
        return Err(ultraspec::Error::TooLarge { dim, cap: DENSE_CAP }.into());
    }
    Ok(OperatorInstance::new(torus_laplacian(d, n), true, 1)?)
}

/// Eigenvalues and `F`. Tori and covers go through their character blocks,
/// so their `F` is the Γ-trace density; other instances are decomposed densely.
fn spectrum(ctx: &Context, spec: &InstanceSpec) -> Result<(Vec<f64>, StepFunction)> {
    let blocks = match spec {
        InstanceSpec::Cycle { n } => Some(torus_blocks(1, *n)?),
        InstanceSpec::Torus { d, n } => Some(torus_blocks(*d, *n)?),
        InstanceSpec::ComplexFile { degree, n, .. } => Some(twisted_blocks(&cover_from_file(ctx, spec, *n)?, *degree)?),
        _ => None,
    };
    if let Some(b) = blocks {
        let mut ev = b.eigenvalues();
        ev.sort_by(f64::total_cmp);
        return Ok((ev, b.density()?));
    }
    let op = dense_operator(ctx, spec)?;
    let d = decompose(&op)?;
    let f = spectral_density_from(&op, &d)?;
    Ok((d.eigenvalues().to_vec(), f))
}

pub fn cmd_spectrum(ctx: &Context) -> Result<Vec<PathBuf>> {
    let (ev, f) = spectrum(ctx, ctx.instance()?)?;
    let mut body = String::from("index,eigenvalue\n");
    for (i, v) in ev.iter().enumerate() {
        let _ = writeln!(body, "{i},{v}");
    }
    Ok(vec![ctx.csv("eigenvalues.csv", &body)?, ctx.csv("density.csv", &step_to_csv(&f))?])
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| (lo.ln() + (hi / lo).ln() * i as f64 / (n - 1) as f64).exp()).collect()
}

pub fn cmd_profiles(ctx: &Context) -> Result<Vec<PathBuf>> {
    let (_, f) = spectrum(ctx, ctx.instance()?)?;
    let p = OrliczProfile::new(f);
    let opts = &ctx.config.profiles;
    let (lmin, lmax) = (p.f().first_location(), p.f().last_location());

    let lambdas = opts.lambda_grid.clone().unwrap_or_else(|| {
        if p.f().is_empty() {
            log_grid(1e-3, 1e3, 25)
        } else {
            p.f().locations().to_vec()
        }
    });
    let gtot = p.g().total_mass();
    let ys = opts.y_grid.clone().unwrap_or_else(|| {
        if gtot > 0.0 {
            log_grid(1e-6 * gtot, 2.0 * gtot, 33)
        } else {
            log_grid(1e-6, 1.0, 33)
        }
    });
    let ts = opts.t_grid.clone().unwrap_or_else(|| match (lmin, lmax) {
        (Some(a), Some(b)) => log_grid(0.01 / b, 100.0 / a, 33),
        _ => log_grid(1e-3, 1e3, 33),
    });

    let mut by_lambda = String::from("lambda,F,G\n");
    for &l in &lambdas {
        let _ = writeln!(by_lambda, "{l},{},{}", p.f().eval(l), p.g().eval(l));
    }
    let mut by_y = String::from("y,H,N\n");
    for &y in &ys {
        let _ = writeln!(by_y, "{y},{},{}", ext(p.h(y)), ext(p.n(y)));
    }
    let mut by_t = String::from("t,L_hat,M_hat\n");
    for &t in &ts {
        let (l, m) = p.heat(t);
        let _ = writeln!(by_t, "{t},{l},{m}");
    }
    Ok(vec![
        ctx.csv("profile_lambda.csv", &by_lambda)?,
        ctx.csv("profile_y.csv", &by_y)?,
        ctx.csv("profile_t.csv", &by_t)?,
    ])
}

/// Runs the suite and writes `report.csv`.
pub fn cmd_certify(ctx: &Context) -> Result<(PathBuf, CertificationReport)> {
    let spec = ctx.instance()?;
    let op = dense_operator(ctx, spec)?;
    let name = instance_name(spec);
    let s = &ctx.config.suite;
    let inst = match s.density_factor {
        Some(factor) => {
            let d = decompose(&op)?;
            let f = spectral_density_from(&op, &d)?.scaled(factor)?;
            CertInstance::with_density(name, op, d, f)?
        }
        None => CertInstance::new(name, op)?,
    };
    let c = s.checks;
    let opts = SuiteOptions {
        random_states: s.states,
        structured_states: s.structured_states,
        checks: CheckSet {
            h_sobolev: c.h_sobolev,
            n_sobolev: c.n_sobolev,
            nash: c.nash,
            faber_krahn: c.faber_krahn,
            uncertainty: c.uncertainty,
            operator_bounds: c.operator_bounds,
        },
        time_points: s.time_points,
        seed: ctx.seed,
    };
    let report = run_suite(&[inst], &opts)?;
    let path = ctx.csv("report.csv", &report.to_csv())?;
    Ok((path, report))
}

/// Insufficient data inside a window is reported as `nan`, not as an error.
fn soft<T>(r: ultraspec::Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(ultraspec::Error::InvalidInput(_) | ultraspec::Error::Diagnostic(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

pub fn cmd_scaling(ctx: &Context) -> Result<Vec<PathBuf>> {
    let sc =
        ctx.config.scaling.as_ref().ok_or_else(|| CliError::Config("scaling needs a \"scaling\" section".into()))?;
    let spec = ctx.instance()?;
    let (degree, cover): (usize, Box<dyn Fn(usize) -> Result<AbelianCoverSpec>>) = match spec {
        InstanceSpec::Cycle { .. } => (sc.degree.unwrap_or(0), Box::new(|n| Ok(lattice_cover(1, n)?))),
        InstanceSpec::Torus { d, .. } => {
            let d = *d;
            (sc.degree.unwrap_or(0), Box::new(move |n| Ok(lattice_cover(d, n)?)))
        }
        InstanceSpec::ComplexFile { degree, .. } => {
            (sc.degree.unwrap_or(*degree), Box::new(move |n| cover_from_file(ctx, spec, n)))
        }
        _ => return Err(CliError::Config("scaling needs a cycle, torus or complex-file instance".into())),
    };

    let mut files = Vec::new();
    let mut summary =
        String::from("n,mass,atoms,alpha,k,c,residual,sobolev_lower,sobolev_upper,alpha_ratio,upper_ratio\n");
    let mut prev: Option<(Option<f64>, Option<f64>)> = None;
    for &n in &sc.sizes {
        let cov = cover(n)?;
        let f = hodge_density(&cov, degree)?;
        files.push(ctx.csv(&format!("density_n{n}.csv"), &step_to_csv(&f))?);
        let fit = match sc.window {
            Some([lo, hi]) => soft(asymptotic_fit(&f, (lo, hi), &sc.k_candidates))?,
            None => None,
        };
        let bracket = match sc.sobolev_p {
            Some(p) => Some(sobolev_ratio(&cov, degree, p, sc.sobolev_samples, sub_seed(ctx.seed, n as u64))?),
            None => None,
        };
        let alpha = fit.as_ref().map(|f| f.alpha);
        let upper = bracket.as_ref().map(|b| b.upper);
        let ratio = |cur: Option<f64>, old: Option<f64>| cur.zip(old).map(|(a, b)| a / b);
        let (ar, ur) = prev.map_or((None, None), |(pa, pu)| (ratio(alpha, pa), ratio(upper, pu)));
        let _ = writeln!(
            summary,
            "{n},{},{},{},{},{},{},{},{},{},{}",
            f.total_mass(),
            f.len(),
            opt(alpha),
            fit.as_ref().map_or("nan".into(), |f| f.k.to_string()),
            opt(fit.as_ref().map(|f| f.c)),
            opt(fit.as_ref().map(|f| f.residual)),
            opt(bracket.as_ref().map(|b| b.lower)),
            opt(upper),
            opt(ar),
            opt(ur),
        );
        prev = Some((alpha, upper));
    }
    files.push(ctx.csv("scaling.csv", &summary)?);
    Ok(files)
}

pub fn cmd_continuum(ctx: &Context) -> Result<Vec<PathBuf>> {
    let c = ctx
        .config
        .continuum
        .as_ref()
        .ok_or_else(|| CliError::Config("continuum needs a \"continuum\" section".into()))?;
    let sigma = match &c.monomials {
        Some(m) => PolynomialSymbol::new(c.dimension, m.iter().map(|t| (t.index.clone(), t.coefficient)).collect())?,
        None => PolynomialSymbol::laplacian(c.dimension),
    };
    let domain = match c.domain {
        DomainConfig::Bounding { half_width } => SamplingDomain::Bounding { half_width },
        DomainConfig::Restricted { half_width } => SamplingDomain::Restricted { half_width },
        DomainConfig::Auto => SamplingDomain::Auto,
    };
    let density = symbol_density(&sigma, &c.grid, c.budget, ctx.seed, domain)?;
    let (f, errs) = density.step_function()?;
    let mut files = vec![ctx.csv("continuum_density.csv", &step_with_errors_to_csv(&f, &errs)?)?];
    if let Some([lo, hi]) = c.window {
        let fit = exponent_readoff(&density, (lo, hi), &c.k_candidates)?;
        let body = format!(
            "alpha,k,c,residual,noise,atoms_used,half_width\n{},{},{},{},{},{},{}\n",
            fit.alpha,
            fit.k,
            fit.c,
            fit.residual,
            opt(fit.noise),
            fit.atoms_used,
            density.half_width
        );
        files.push(ctx.csv("continuum_fit.csv", &body)?);
    }
    Ok(files)
}
