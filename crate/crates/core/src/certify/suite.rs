use nalgebra::DVector;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::checks::{
    check_faber_krahn, check_h_sobolev, check_n_sobolev, check_nash, check_uncertainty, uncertainty_constant,
    validate_minorant, TestState,
};
use crate::error::Result;
use crate::monocalc::{
    growth_sandwich, laplace_comparison, nash_minorant, ConvexMinorant, MeasuredHeat, OrliczProfile, StepFunction,
};
use crate::report::{CertificationReport, CheckRecord};
use crate::seeds::{rng_for, sub_seed};
use crate::spectral_ops::{
    decompose, heat_norms, resolvent_projector_norm, spectral_density_from, OperatorInstance, SpectralDecomposition,
};

/// An operator together with everything the checks read from it.
#[derive(Clone, Debug)]
pub struct CertInstance {
    pub name: String,
    pub op: OperatorInstance,
    pub decomposition: SpectralDecomposition,
    pub profile: OrliczProfile,
    pub minorant: ConvexMinorant,
    /// Which density and minorant feed the checks.
    pub provenance: String,
}

impl CertInstance {
    pub fn new(name: impl Into<String>, op: OperatorInstance) -> Result<Self> {
        let d = decompose(&op)?;
        Self::from_parts(name, op, d)
    }

    pub fn from_parts(name: impl Into<String>, op: OperatorInstance, d: SpectralDecomposition) -> Result<Self> {
        let f = spectral_density_from(&op, &d)?;
        let path = if op.is_invariant() && op.fiber() == 1 { "count" } else { "ultra-norm" };
        let mut inst = Self::with_density(name, op, d, f)?;
        inst.provenance = format!("F={path};phi=hull");
        Ok(inst)
    }

    /// Uses a supplied `F` instead of the instance's own density.
    pub fn with_density(
        name: impl Into<String>,
        op: OperatorInstance,
        d: SpectralDecomposition,
        f: StepFunction,
    ) -> Result<Self> {
        let minorant = nash_minorant(&f)?;
        Ok(CertInstance {
            name: name.into(),
            op,
            decomposition: d,
            profile: OrliczProfile::new(f),
            minorant,
            provenance: "F=supplied;phi=hull".into(),
        })
    }

    pub fn density(&self) -> &StepFunction {
        self.profile.f()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CheckSet {
    pub h_sobolev: bool,
    pub n_sobolev: bool,
    pub nash: bool,
    pub faber_krahn: bool,
    pub uncertainty: bool,
    /// Resolvent and heat bounds, growth sandwich, Laplace comparisons.
    pub operator_bounds: bool,
}

impl CheckSet {
    pub fn all() -> Self {
        CheckSet {
            h_sobolev: true,
            n_sobolev: true,
            nash: true,
            faber_krahn: true,
            uncertainty: true,
            operator_bounds: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteOptions {
    /// Gaussian states projected off the kernel. With zero, no states at all.
    pub random_states: usize,
    /// Adds point differences and the lowest eigenvectors to random states.
    pub structured_states: bool,
    pub checks: CheckSet,
    /// Number of log-spaced times for the heat comparisons.
    pub time_points: usize,
    pub seed: u64,
}

impl SuiteOptions {
    pub fn new(random_states: usize, seed: u64) -> Self {
        SuiteOptions { random_states, structured_states: true, checks: CheckSet::all(), time_points: 20, seed }
    }
}

/// States for one instance: point differences, low eigenvectors, then random.
pub fn generate_states(inst: &CertInstance, opts: &SuiteOptions, instance_index: usize) -> Result<Vec<TestState>> {
    let n = inst.op.dim();
    let d = &inst.decomposition;
    let mut raw: Vec<(String, DVector<f64>)> = Vec::new();
    if opts.random_states == 0 {
        return Ok(Vec::new());
    }
    if opts.structured_states && n >= 2 {
        for (a, b) in [(0, n / 2), (0, 1)] {
            if a != b {
                let mut f = DVector::zeros(n);
                f[a] = 1.0;
                f[b] = -1.0;
                raw.push((format!("diff-{a}-{b}"), f));
            }
        }
        let start = d.first_positive();
        for j in start..(start + 2).min(n) {
            raw.push((format!("eigen-{j}"), d.eigenvectors().column(j).into_owned()));
        }
    }
    let master = sub_seed(opts.seed, instance_index as u64);
    for i in 0..opts.random_states {
        let mut rng = rng_for(master, i as u64);
        let f = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
        raw.push((format!("random-{i:04}"), f));
    }
    raw.into_iter()
        .filter_map(|(name, f)| match TestState::new(name, &inst.op, d, &f) {
            Ok(s) => Some(Ok(s)),
            // a structured vector may lie in the kernel
            Err(crate::Error::InvalidInput(_)) => None,
            Err(e) => Some(Err(e)),
        })
        .collect()
}

/// All state-level checks for one state.
pub fn certify_state(inst: &CertInstance, state: &TestState, checks: CheckSet) -> Result<Vec<CheckRecord>> {
    let f = inst.density();
    let mut out = Vec::new();
    if checks.h_sobolev {
        out.push(check_h_sobolev(state, &inst.profile)?);
    }
    if checks.n_sobolev {
        out.push(check_n_sobolev(state, &inst.profile)?);
    }
    if checks.nash {
        out.extend(check_nash(state, f, &inst.minorant)?);
    }
    if checks.faber_krahn {
        out.push(check_faber_krahn(state, &inst.minorant));
    }
    if checks.uncertainty {
        out.push(check_uncertainty(state, f, uncertainty_constant(f, &inst.minorant)?));
    }
    Ok(out)
}

/// Log-spaced times covering the spectral range.
pub fn time_grid(d: &SpectralDecomposition, points: usize) -> Vec<f64> {
    let (Some(lo), hi) = (d.lambda_min_positive(), d.lambda_max()) else { return Vec::new() };
    if points == 0 {
        return Vec::new();
    }
    let (a, b) = ((0.1 / hi).ln(), (10.0 / lo).ln());
    (0..points)
        .map(|i| {
            let s = if points == 1 { 0.0 } else { i as f64 / (points - 1) as f64 };
            (a + (b - a) * s).exp()
        })
        .collect()
}

/// Instance-level comparisons: resolvent and heat bounds, the growth
/// sandwich, and the Laplace-transform comparisons.
pub fn certify_operator(inst: &CertInstance, time_points: usize) -> Result<Vec<CheckRecord>> {
    let d = &inst.decomposition;
    let f = inst.density();
    let g = inst.profile.g();
    let mut out = Vec::new();
    let exact = inst.op.is_invariant() && inst.op.fiber() == 1;
    for (lambda, _) in d.clusters() {
        let r = resolvent_projector_norm(d, lambda);
        // The projector takes the whole cluster; G must see the same atoms even
        // when its location rounds a few ulps above `lambda`.
        let g_at = g.eval(lambda + d.cluster_tolerance());
        let param = format!("lambda={lambda}");
        out.push(CheckRecord::le("resolvent<=G", r, g_at).with_param(param.clone()));
        if exact {
            out.push(CheckRecord::ge("resolvent>=G", r, g_at).with_param(param));
        }
    }
    let ts = time_grid(d, time_points);
    let measured: Vec<MeasuredHeat> = ts
        .iter()
        .map(|&t| {
            let (l, m) = heat_norms(d, t);
            MeasuredHeat { l, m }
        })
        .collect();
    out.extend(laplace_comparison(&inst.profile, &ts, inst.op.fiber(), Some(&measured), inst.op.is_invariant())?);
    if let (Some(lo), Some(hi)) = (f.first_location(), f.last_location()) {
        out.extend(growth_sandwich(f, 1.0, (lo, hi)).records);
    }
    Ok(out)
}

/// Runs every enabled check on every instance and state.
///
/// States are evaluated in parallel; the report is sorted by
/// `(instance, state, check)` so its CSV is independent of scheduling.
pub fn run_suite(instances: &[CertInstance], opts: &SuiteOptions) -> Result<CertificationReport> {
    let mut report = CertificationReport::new(opts.seed);
    for (idx, inst) in instances.iter().enumerate() {
        if opts.checks.nash || opts.checks.faber_krahn || opts.checks.uncertainty {
            validate_minorant(inst.density(), &inst.minorant)?;
        }
        let states = generate_states(inst, opts, idx)?;
        let per_state: Result<Vec<Vec<CheckRecord>>> = states
            .par_iter()
            .map(|s| {
                Ok(certify_state(inst, s, opts.checks)?
                    .into_iter()
                    .map(|r| r.at(&inst.name, &s.name).with_provenance(&inst.provenance))
                    .collect())
            })
            .collect();
        report.extend(per_state?.into_iter().flatten());
        if opts.checks.operator_bounds && !states.is_empty() {
            report.extend(
                certify_operator(inst, opts.time_points)?
                    .into_iter()
                    .map(|r| r.at(&inst.name, "-").with_provenance(&inst.provenance)),
            );
        }
    }
    report.sort();
    Ok(report)
}
