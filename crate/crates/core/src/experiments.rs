//! Named, seeded experiments with serializable configs and pass/fail
//! reports. Every experiment is a pure function of its config and seed.

use std::f64::consts::{PI, TAU};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::carfock::{
    cocycle_loop, cocycle_trace_loops, composition_phase, hs_criterion, implement, jacobi_check,
    random_loop, rough_loop, smooth_test_loop, FockSpace, LoopElement,
};
use crate::cechdeligne::{
    bockstein, check_cocycle, demo_cover, demo_gerbe, level_gerbe, monopole_demo, verify_deligne,
};
use crate::dirac::{
    lattice_eigenvalues_near, spectral_flow, spectral_flow_tracks, CoverSpec, FlowTracks,
    HolonomyPoint, LatticeOptions,
};
use crate::error::{Error, Result};
use crate::extensions::{
    associativity_defect, distance_to_integer, mf_cocycle, mf_identity, random_disk_map,
    random_gauge_data, random_sphere_map, wzw, BallExtension, Profile,
};
use crate::geometry::charts::{su2_hyperspherical, S3_BOX};
use crate::geometry::{integrate_form, Chart, FieldRef, FormWord, QuadratureSpec};
use crate::lie::{
    c, exp_skew, random_su, random_su2, random_unitary, SkewHermitianMatrix, UnitaryMatrix, C64,
};

pub const SCHEMA_VERSION: u32 = 1;

/// The experiments, one per subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Spectrum,
    SpectralFlow,
    GerbeCocycle,
    Bockstein,
    Deligne,
    Monopole,
    Winding,
    CarCocycle,
    Implementer,
    HsCriterion,
    GammaAssoc,
    #[serde(rename = "wzw-mod1")]
    WzwMod1,
    MfIdentity,
}

impl Experiment {
    pub const ALL: [Experiment; 13] = [
        Experiment::Spectrum,
        Experiment::SpectralFlow,
        Experiment::GerbeCocycle,
        Experiment::Bockstein,
        Experiment::Deligne,
        Experiment::Monopole,
        Experiment::Winding,
        Experiment::CarCocycle,
        Experiment::Implementer,
        Experiment::HsCriterion,
        Experiment::GammaAssoc,
        Experiment::WzwMod1,
        Experiment::MfIdentity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Spectrum => "spectrum",
            Experiment::SpectralFlow => "spectral-flow",
            Experiment::GerbeCocycle => "gerbe-cocycle",
            Experiment::Bockstein => "bockstein",
            Experiment::Deligne => "deligne",
            Experiment::Monopole => "monopole",
            Experiment::Winding => "winding",
            Experiment::CarCocycle => "car-cocycle",
            Experiment::Implementer => "implementer",
            Experiment::HsCriterion => "hs-criterion",
            Experiment::GammaAssoc => "gamma-assoc",
            Experiment::WzwMod1 => "wzw-mod1",
            Experiment::MfIdentity => "mf-identity",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == name)
    }
}

macro_rules! config {
    ($(#[$doc:meta])* $name:ident { $($(#[$fdoc:meta])* $field:ident : $ty:ty = $default:expr),* $(,)? }) => {
        $(#[$doc])*
        #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
        #[serde(deny_unknown_fields, default)]
        pub struct $name {
            $($(#[$fdoc])* pub $field: $ty),*
        }

        impl Default for $name {
            fn default() -> Self {
                Self { $($field: $default),* }
            }
        }
    };
}

config!(
    /// Lattice eigenvalues of `−i d/dx` with twisted boundary condition
    /// against `Z + arg(λ_k)/2π`.
    SpectrumConfig {
        samples: usize = 10,
        grid: usize = 2000,
        count: usize = 6,
        tolerance: f64 = 1e-4,
    }
);

config!(
    /// Spectral flow of a charge loop, a constant path, and concatenated
    /// random path pairs.
    SpectralFlowConfig {
        charge: i64 = 1,
        level: f64 = 0.5,
        steps: usize = 200,
        pairs: usize = 20,
    }
);

config!(
    /// The spectral-window cocycle on level covers of `SU(2)`.
    GerbeCocycleConfig {
        covers: Vec<usize> = vec![4, 5, 6],
        offset: f64 = 0.3,
        samples: usize = 100,
        tolerance: f64 = 1e-10,
    }
);

config!(
    /// Bockstein integers of the spectral-window cocycle.
    BocksteinConfig {
        covers: Vec<usize> = vec![4, 5, 6],
        offset: f64 = 0.3,
        samples: usize = 100,
        tolerance: f64 = 1e-6,
        /// Integer every sampled value must equal.
        expected: i64 = 0,
    }
);

config!(
    /// Deligne relations of randomly generated gerbe data on four balls.
    DeligneConfig {
        instances: usize = 3,
        samples: usize = 100,
        tolerance: f64 = 1e-6,
    }
);

config!(
    /// The charge-`k` monopole line bundle on `S²`.
    MonopoleConfig {
        charges: Vec<i64> = vec![-3, 0, 1, 5],
        samples: usize = 200,
        equator_nodes: usize = 64,
        residual_tolerance: f64 = 1e-6,
        integral_tolerance: f64 = 1e-8,
    }
);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum WindingGroup {
    /// The identity map of `SU(2) = S³`.
    Su2,
    /// Its pointwise inverse.
    Su2Inverse,
}

config!(
    /// `(1/24π²) ∫ tr (g⁻¹dg)³` over `SU(2)`.
    WindingConfig {
        group: WindingGroup = WindingGroup::Su2,
        nodes: usize = 24,
        tolerance: f64 = 1e-3,
        /// Defects below this are treated as converged.
        roundoff: f64 = 1e-12,
    }
);

config!(
    /// Trace cocycle of truncated multiplication operators against the
    /// loop cocycle, and the Jacobi identity.
    CarCocycleConfig {
        m: i64 = 1,
        n: i64 = -1,
        cutoff: usize = 4,
        internal: usize = 2,
        pairs: usize = 5,
        /// Check every pair `|m|, |n| ≤ sweep_max_mode` instead of `(m, n)`.
        sweep: bool = false,
        sweep_max_mode: i64 = 3,
        tolerance: f64 = 1e-12,
        jacobi_cutoff: usize = 4,
        jacobi_tolerance: f64 = 1e-10,
    }
);

config!(
    /// Fock implementers of random one-particle unitaries.
    ImplementerConfig {
        dim: usize = 6,
        unitaries: usize = 10,
        residual_tolerance: f64 = 1e-10,
        phase_tolerance: f64 = 1e-10,
    }
);

config!(
    /// Hilbert–Schmidt growth of off-diagonal blocks for smooth and rough
    /// loops.
    HsCriterionConfig {
        max_cutoff: usize = 64,
        smooth_loops: usize = 3,
        internal: usize = 2,
        tail_tolerance: f64 = 1e-3,
        divergence_slope: f64 = 0.5,
    }
);

config!(
    /// Integrality of the associativity defect of the disk-group cocycle.
    GammaAssocConfig {
        triples: usize = 5,
        dim: usize = 2,
        amplitude: f64 = 1.5,
        /// Boundary winding carried by every map of the triple.
        winding: i32 = 0,
        nodes: usize = 24,
        tolerance: f64 = 1e-4,
    }
);

config!(
    /// Extension independence of the Wess–Zumino term modulo integers.
    WzwMod1Config {
        maps: usize = 5,
        amplitude: f64 = 2.5,
        nodes: usize = 20,
        /// `radial-linear`, `radial-smoothstep` or `bubble:<degree>`.
        extensions: Vec<String> = vec!["radial-linear".into(), "bubble:1".into()],
        tolerance: f64 = 1e-4,
    }
);

config!(
    /// The Mickelsson–Faddeev cocycle identity on `S³`.
    MfIdentityConfig {
        /// Matrix sizes of the `su(N)` test data.
        dims: Vec<usize> = vec![2, 3],
        nodes: usize = 16,
        coarse_nodes: usize = 8,
        tolerance: f64 = 1e-6,
        exact_tolerance: f64 = 1e-12,
        /// Terms below this count as vanishing.
        vanishing: f64 = 1e-10,
    }
);

/// A config for one of the experiments.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ExperimentConfig {
    Spectrum(SpectrumConfig),
    SpectralFlow(SpectralFlowConfig),
    GerbeCocycle(GerbeCocycleConfig),
    Bockstein(BocksteinConfig),
    Deligne(DeligneConfig),
    Monopole(MonopoleConfig),
    Winding(WindingConfig),
    CarCocycle(CarCocycleConfig),
    Implementer(ImplementerConfig),
    HsCriterion(HsCriterionConfig),
    GammaAssoc(GammaAssocConfig),
    WzwMod1(WzwMod1Config),
    MfIdentity(MfIdentityConfig),
}

fn from_table<T: serde::de::DeserializeOwned>(table: toml::Table) -> Result<T> {
    T::deserialize(toml::Value::Table(table))
        .map_err(|e| Error::Validation(format!("invalid config: {}", e.message())))
}

impl ExperimentConfig {
    pub fn default_for(e: Experiment) -> Self {
        Self::from_table(e, toml::Table::new()).expect("defaults deserialize")
    }

    /// Parses the experiment's keys; unknown keys are rejected.
    pub fn from_table(e: Experiment, table: toml::Table) -> Result<Self> {
        Ok(match e {
            Experiment::Spectrum => Self::Spectrum(from_table(table)?),
            Experiment::SpectralFlow => Self::SpectralFlow(from_table(table)?),
            Experiment::GerbeCocycle => Self::GerbeCocycle(from_table(table)?),
            Experiment::Bockstein => Self::Bockstein(from_table(table)?),
            Experiment::Deligne => Self::Deligne(from_table(table)?),
            Experiment::Monopole => Self::Monopole(from_table(table)?),
            Experiment::Winding => Self::Winding(from_table(table)?),
            Experiment::CarCocycle => Self::CarCocycle(from_table(table)?),
            Experiment::Implementer => Self::Implementer(from_table(table)?),
            Experiment::HsCriterion => Self::HsCriterion(from_table(table)?),
            Experiment::GammaAssoc => Self::GammaAssoc(from_table(table)?),
            Experiment::WzwMod1 => Self::WzwMod1(from_table(table)?),
            Experiment::MfIdentity => Self::MfIdentity(from_table(table)?),
        })
    }

    /// Parses a config file body. An optional top-level `experiment` key must
    /// name `e`; a file with no keys at all is rejected.
    pub fn parse(e: Experiment, text: &str) -> Result<Self> {
        let mut table: toml::Table = text.parse().map_err(|err: toml::de::Error| {
            Error::Validation(format!("invalid config: {}", err.message()))
        })?;
        if table.is_empty() {
            return Err(Error::Validation("config file is empty".into()));
        }
        if let Some(name) = table.remove("experiment") {
            if name.as_str() != Some(e.name()) {
                return Err(Error::Validation(format!(
                    "config is for experiment {name}, not {}",
                    e.name()
                )));
            }
        }
        let cfg = Self::from_table(e, table)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn experiment(&self) -> Experiment {
        match self {
            Self::Spectrum(_) => Experiment::Spectrum,
            Self::SpectralFlow(_) => Experiment::SpectralFlow,
            Self::GerbeCocycle(_) => Experiment::GerbeCocycle,
            Self::Bockstein(_) => Experiment::Bockstein,
            Self::Deligne(_) => Experiment::Deligne,
            Self::Monopole(_) => Experiment::Monopole,
            Self::Winding(_) => Experiment::Winding,
            Self::CarCocycle(_) => Experiment::CarCocycle,
            Self::Implementer(_) => Experiment::Implementer,
            Self::HsCriterion(_) => Experiment::HsCriterion,
            Self::GammaAssoc(_) => Experiment::GammaAssoc,
            Self::WzwMod1(_) => Experiment::WzwMod1,
            Self::MfIdentity(_) => Experiment::MfIdentity,
        }
    }

    /// Parameter checks that need no computation.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Validation(msg.into()));
        match self {
            Self::Spectrum(c) if c.grid < 8 || c.count == 0 => {
                bad("spectrum needs grid ≥ 8 and count ≥ 1")
            }
            Self::SpectralFlow(c) if c.steps < 2 => bad("spectral-flow needs at least 2 steps"),
            Self::GerbeCocycle(GerbeCocycleConfig { covers, offset, .. })
            | Self::Bockstein(BocksteinConfig { covers, offset, .. }) => {
                for &m in covers {
                    CoverSpec::equispaced(m, *offset)?;
                }
                Ok(())
            }
            Self::Winding(c) if c.nodes < 2 => bad("winding needs at least 2 nodes"),
            Self::CarCocycle(c) if c.cutoff == 0 || c.internal == 0 => {
                bad("car-cocycle needs cutoff ≥ 1 and internal ≥ 1")
            }
            Self::Implementer(c) if c.dim > crate::carfock::fock::MAX_ONE_PARTICLE_DIM => {
                Err(Error::DimensionCap {
                    requested: c.dim,
                    cap: crate::carfock::fock::MAX_ONE_PARTICLE_DIM,
                })
            }
            Self::HsCriterion(c) if c.max_cutoff < 2 => bad("hs-criterion needs max_cutoff ≥ 2"),
            Self::GammaAssoc(c) if c.nodes < 2 || c.dim == 0 => {
                bad("gamma-assoc needs nodes ≥ 2 and dim ≥ 1")
            }
            Self::WzwMod1(c) => {
                if c.extensions.len() < 2 {
                    return bad("wzw-mod1 needs at least two extensions");
                }
                c.extensions
                    .iter()
                    .try_for_each(|s| parse_extension(s).map(|_| ()))
            }
            Self::MfIdentity(c) if c.dims.contains(&0) || c.nodes < 2 || c.coarse_nodes < 2 => {
                bad("mf-identity needs positive dims and at least 2 nodes")
            }
            _ => Ok(()),
        }
    }

    /// The config as a TOML table.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configs serialize")
    }
}

fn parse_extension(s: &str) -> Result<BallExtension> {
    match s {
        "radial-linear" => Ok(BallExtension::radial(Profile::Linear)),
        "radial-smoothstep" => Ok(BallExtension::radial(Profile::Smoothstep)),
        _ => s
            .strip_prefix("bubble:")
            .and_then(|d| d.parse::<i32>().ok())
            .map(BallExtension::bubble)
            .ok_or_else(|| Error::Validation(format!("unknown ball extension {s:?}"))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// Passes when `value ≤ tolerance`.
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            pass: value <= tolerance,
        }
    }

    /// Passes when `|value − expected| ≤ tolerance`.
    pub fn near(name: impl Into<String>, value: f64, expected: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            pass: (value - expected).abs() <= tolerance,
        }
    }

    /// Passes when `value > threshold`; the threshold is reported as the
    /// tolerance.
    pub fn above(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance: threshold,
            pass: value > threshold,
        }
    }

    /// Exact integer equality.
    pub fn equals(name: impl Into<String>, value: i64, expected: i64) -> Self {
        Self {
            name: name.into(),
            value: value as f64,
            tolerance: 0.0,
            pass: value == expected,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub experiment: Experiment,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub checks: Vec<Check>,
    pub pass: bool,
    pub wall_time_s: f64,
    pub version: &'static str,
}

impl Report {
    pub fn failing(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// Output of a run: the report plus optional eigenvalue tracks.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: Report,
    pub tracks: Option<FlowTracks>,
}

pub fn run(config: &ExperimentConfig, seed: u64) -> Result<RunOutput> {
    config.validate()?;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tracks = None;
    let checks = match config {
        ExperimentConfig::Spectrum(c) => run_spectrum(c, &mut rng)?,
        ExperimentConfig::SpectralFlow(c) => {
            let (checks, t) = run_spectral_flow(c, &mut rng)?;
            tracks = Some(t);
            checks
        }
        ExperimentConfig::GerbeCocycle(c) => run_gerbe_cocycle(c, seed)?,
        ExperimentConfig::Bockstein(c) => run_bockstein(c, seed)?,
        ExperimentConfig::Deligne(c) => run_deligne(c, &mut rng)?,
        ExperimentConfig::Monopole(c) => run_monopole(c, &mut rng)?,
        ExperimentConfig::Winding(c) => run_winding(c)?,
        ExperimentConfig::CarCocycle(c) => run_car_cocycle(c, &mut rng)?,
        ExperimentConfig::Implementer(c) => run_implementer(c, &mut rng)?,
        ExperimentConfig::HsCriterion(c) => run_hs_criterion(c, &mut rng)?,
        ExperimentConfig::GammaAssoc(c) => run_gamma_assoc(c, &mut rng)?,
        ExperimentConfig::WzwMod1(c) => run_wzw_mod1(c, &mut rng)?,
        ExperimentConfig::MfIdentity(c) => run_mf_identity(c, &mut rng)?,
    };
    let pass = checks.iter().all(|c| c.pass);
    Ok(RunOutput {
        report: Report {
            schema_version: SCHEMA_VERSION,
            experiment: config.experiment(),
            seed,
            config: config.clone(),
            checks,
            pass,
            wall_time_s: start.elapsed().as_secs_f64(),
            version: env!("CARGO_PKG_VERSION"),
        },
        tracks,
    })
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

fn run_spectrum(c: &SpectrumConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let mut worst: f64 = 0.0;
    for k in 0..c.samples {
        let g = random_su2(rng);
        let opts = LatticeOptions {
            grid: c.grid,
            seed: k as u64,
            ..LatticeOptions::default()
        };
        let computed = lattice_eigenvalues_near(&g, 0.0, c.count, opts)?;
        let (fractional, _) = HolonomyPoint::new(g).fractional_spectrum();
        for x in computed {
            let d = fractional
                .iter()
                .map(|y| {
                    let t = x - y;
                    (t - t.round()).abs()
                })
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(d);
        }
    }
    Ok(vec![Check::at_most(
        "max_eigenvalue_deviation",
        worst,
        c.tolerance,
    )])
}

fn diagonal_path(
    phases: impl Fn(f64) -> Vec<f64>,
    frame: impl Fn(f64) -> UnitaryMatrix,
    steps: usize,
) -> Result<Vec<HolonomyPoint>> {
    (0..=steps)
        .map(|i| {
            let t = i as f64 / steps as f64;
            let d = UnitaryMatrix::diagonal(
                &phases(t)
                    .iter()
                    .map(|s| C64::from_polar(1.0, TAU * s))
                    .collect::<Vec<_>>(),
            )?;
            Ok(HolonomyPoint::new(d.conjugate_by(&frame(t))))
        })
        .collect()
}

/// Expected flow of a path whose fractional eigenvalues are `s_k(t)`.
fn lifted_flow(start: &[f64], end: &[f64], mu: f64) -> i64 {
    let count = |v: &[f64]| v.iter().map(|x| (x - mu).floor() as i64).sum::<i64>();
    count(end) - count(start)
}

fn run_spectral_flow(
    c: &SpectralFlowConfig,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<Check>, FlowTracks)> {
    let charge_loop = diagonal_path(
        |t| vec![c.charge as f64 * t],
        |_| UnitaryMatrix::identity(1),
        c.steps,
    )?;
    let tracks = spectral_flow_tracks(&charge_loop, c.level)?;
    let mut checks = vec![Check::equals("charge_loop_flow", tracks.flow, c.charge)];

    let g = HolonomyPoint::new(random_su2(rng));
    let level = if crate::dirac::level_gap(&g.fractional_spectrum().0, c.level) > 1e-3 {
        c.level
    } else {
        c.level + 0.01
    };
    checks.push(Check::equals(
        "constant_path_flow",
        spectral_flow(&vec![g; c.steps + 1], level)?,
        0,
    ));

    let mut mismatches = 0i64;
    let mut oracle_mismatches = 0i64;
    for _ in 0..c.pairs {
        let (x, v0) = (
            SkewHermitianMatrix::new(random_su(2, rng).into_matrix())?,
            random_unitary(2, rng),
        );
        let draw =
            |rng: &mut ChaCha8Rng| [rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5)];
        let (a, b, d) = (draw(rng), draw(rng), draw(rng));
        let wiggle = rng.random_range(0.0..0.3);
        let frame = move |t: f64| {
            let scaled = SkewHermitianMatrix::new(x.matrix() * c64(t)).expect("skew");
            v0.mul(&exp_skew(&scaled))
        };
        let seg = |p: [f64; 2], q: [f64; 2], t: f64| -> Vec<f64> {
            (0..2)
                .map(|k| p[k] + (q[k] - p[k]) * t + wiggle * (PI * t).sin())
                .collect()
        };
        let mu = c.level;
        if [a, b, d]
            .iter()
            .any(|p| p.iter().any(|s| ((s - mu) - (s - mu).round()).abs() < 1e-6))
        {
            continue;
        }
        let f2 = frame.clone();
        let p1 = diagonal_path(|t| seg(a, b, t), &frame, c.steps)?;
        let p2 = diagonal_path(|t| seg(b, d, t), move |t| f2(1.0 + t), c.steps)?;
        let joined: Vec<HolonomyPoint> = p1.iter().chain(p2.iter().skip(1)).cloned().collect();
        let (f1, f2, f12) = (
            spectral_flow(&p1, mu)?,
            spectral_flow(&p2, mu)?,
            spectral_flow(&joined, mu)?,
        );
        mismatches += (f12 != f1 + f2) as i64;
        oracle_mismatches += (f12 != lifted_flow(&a, &d, mu)) as i64;
    }
    checks.push(Check::equals("concatenation_mismatches", mismatches, 0));
    checks.push(Check::equals(
        "lifted_oracle_mismatches",
        oracle_mismatches,
        0,
    ));
    Ok((checks, tracks))
}

fn c64(x: f64) -> C64 {
    c(x, 0.0)
}

fn level_samples(
    m: usize,
    offset: f64,
    samples: usize,
    seed: u64,
) -> Result<(
    crate::cechdeligne::CechCochain,
    Vec<crate::cechdeligne::TupleSample>,
)> {
    let cover_spec = CoverSpec::equispaced(m, offset)?;
    let (cover, f) = level_gerbe(su2_hyperspherical(), &cover_spec);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ m as u64);
    let samples = cover.sample_overlaps(4, samples, &mut rng)?;
    Ok((f, samples))
}

fn run_gerbe_cocycle(c: &GerbeCocycleConfig, seed: u64) -> Result<Vec<Check>> {
    c.covers
        .iter()
        .map(|&m| {
            let (f, samples) = level_samples(m, c.offset, c.samples, seed)?;
            Ok(Check::at_most(
                format!("cocycle_defect_m{m}"),
                check_cocycle(&f, &samples)?,
                c.tolerance,
            ))
        })
        .collect()
}

fn run_bockstein(c: &BocksteinConfig, seed: u64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for &m in &c.covers {
        let (f, samples) = level_samples(m, c.offset, c.samples, seed)?;
        let mut worst: f64 = 0.0;
        let mut off_target = 0;
        for (tuple, u) in &samples {
            let b = bockstein(&f, [tuple[0], tuple[1], tuple[2], tuple[3]], u)?;
            worst = worst.max(b.distance_to_integer());
            off_target += (b.integer != c.expected) as i64;
        }
        checks.push(Check::at_most(
            format!("distance_to_integer_m{m}"),
            worst,
            c.tolerance,
        ));
        checks.push(Check::equals(
            format!("values_off_expected_m{m}"),
            off_target,
            0,
        ));
    }
    Ok(checks)
}

fn run_deligne(c: &DeligneConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let cover = demo_cover();
    let mut worst = [0.0f64; 3];
    for _ in 0..c.instances {
        let data = demo_gerbe(rng.random());
        let r = verify_deligne(&data, &cover, c.samples, rng)?;
        worst = [
            worst[0].max(r.transition),
            worst[1].max(r.connection),
            worst[2].max(r.curvature),
        ];
    }
    Ok(vec![
        Check::at_most("transition_residual", worst[0], c.tolerance),
        Check::at_most("connection_residual", worst[1], c.tolerance),
        Check::at_most("curvature_residual", worst[2], c.tolerance),
    ])
}

fn run_monopole(c: &MonopoleConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for &k in &c.charges {
        let demo = monopole_demo(k);
        let r = verify_deligne(&demo.data, &demo.cover, c.samples, rng)?;
        checks.push(Check::at_most(
            format!("residual_k{k}"),
            r.max(),
            c.residual_tolerance,
        ));
        let integral = demo.equator_integral(c.equator_nodes)?;
        checks.push(Check::near(
            format!("equator_integral_k{k}"),
            integral,
            k as f64,
            c.integral_tolerance,
        ));
    }
    Ok(checks)
}

fn run_winding(c: &WindingConfig) -> Result<Vec<Check>> {
    let chart: Chart = match c.group {
        WindingGroup::Su2 => su2_hyperspherical(),
        WindingGroup::Su2Inverse => su2_hyperspherical().pointwise_adjoint(),
    };
    debug_assert_eq!(chart.bounds(), S3_BOX);
    let norm = 24.0 * PI * PI;
    let coarse = integrate_form(
        FormWord::MaurerCartan3,
        &[FieldRef::Map(&chart)],
        QuadratureSpec::gauss(c.nodes),
    )?
    .value
    .re / norm;
    let fine = integrate_form(
        FormWord::MaurerCartan3,
        &[FieldRef::Map(&chart)],
        QuadratureSpec::gauss(2 * c.nodes),
    )?
    .value
    .re / norm;
    let expected = match c.group {
        WindingGroup::Su2 => 1.0,
        WindingGroup::Su2Inverse => -1.0,
    };
    let defect = distance_to_integer(coarse);
    let fine_defect = distance_to_integer(fine);
    Ok(vec![
        Check::at_most("winding_defect", defect, c.tolerance),
        Check::at_most("refined_defect", fine_defect, defect.max(c.roundoff)),
        Check::near("winding", coarse, expected, c.tolerance),
    ])
}

fn run_car_cocycle(c: &CarCocycleConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let pairs: Vec<(i64, i64)> = if c.sweep {
        let r = c.sweep_max_mode;
        (-r..=r)
            .flat_map(|m| (-r..=r).map(move |n| (m, n)))
            .collect()
    } else {
        vec![(c.m, c.n)]
    };
    let mut worst: f64 = 0.0;
    for (m, n) in pairs {
        for _ in 0..c.pairs {
            let a = random_su(c.internal, rng).into_matrix();
            let b = random_su(c.internal, rng).into_matrix();
            let trace = cocycle_trace_loops(
                &LoopElement::mode(m, a.clone()),
                &LoopElement::mode(n, b.clone()),
                c.cutoff,
            )?;
            worst = worst.max((trace - cocycle_loop(&a, &b, m, n)?).norm());
        }
    }
    let (x, y, z) = (
        random_loop(c.internal, 1, rng),
        random_loop(c.internal, 1, rng),
        random_loop(c.internal, 1, rng),
    );
    Ok(vec![
        Check::at_most("trace_minus_loop", worst, c.tolerance),
        Check::at_most(
            "jacobi_residual",
            jacobi_check(&x, &y, &z, c.jacobi_cutoff)?,
            c.jacobi_tolerance,
        ),
    ])
}

fn run_implementer(c: &ImplementerConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let fock = FockSpace::new(c.dim)?;
    let gs: Vec<UnitaryMatrix> = (0..c.unitaries)
        .map(|_| random_unitary(c.dim, rng))
        .collect();
    let imps = gs
        .iter()
        .map(|g| implement(g, &fock))
        .collect::<Result<Vec<_>>>()?;
    let residual = max_of(imps.iter().map(|i| i.residual));
    let ambiguous = imps.iter().filter(|i| i.phase_ambiguity != 1).count() as i64;
    let mut phase_defect: f64 = 0.0;
    for k in 0..gs.len() {
        let (g, h) = (&gs[k], &gs[(k + 1) % gs.len()]);
        let gh = implement(&g.mul(h), &fock)?;
        let z = composition_phase(&gh, &imps[k], &imps[(k + 1) % gs.len()]);
        phase_defect = phase_defect.max((z.norm() - 1.0).abs());
    }
    Ok(vec![
        Check::at_most("intertwining_residual", residual, c.residual_tolerance),
        Check::equals("phase_ambiguity_not_one", ambiguous, 0),
        Check::at_most(
            "composition_phase_modulus_defect",
            phase_defect,
            c.phase_tolerance,
        ),
    ])
}

fn run_hs_criterion(c: &HsCriterionConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let mut tail: f64 = 0.0;
    let mut smooth_slope = f64::NEG_INFINITY;
    for _ in 0..c.smooth_loops {
        let g = smooth_test_loop(c.internal, 2 * c.max_cutoff, rng)?;
        let r = hs_criterion(&g, c.max_cutoff)?;
        tail = tail.max(r.tail_increment);
        smooth_slope = smooth_slope.max(r.log_slope);
    }
    let rough = hs_criterion(&rough_loop(2 * c.max_cutoff + 1), c.max_cutoff)?;
    Ok(vec![
        Check::at_most("smooth_tail_increment", tail, c.tail_tolerance),
        Check::at_most("smooth_log_slope", smooth_slope, c.divergence_slope),
        Check::above("rough_log_slope", rough.log_slope, c.divergence_slope),
    ])
}

fn run_gamma_assoc(c: &GammaAssocConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let q = QuadratureSpec::gauss(c.nodes);
    let mut worst: f64 = 0.0;
    let mut imaginary: f64 = 0.0;
    let mut defects = Vec::new();
    for _ in 0..c.triples {
        let ms = (0..3)
            .map(|_| random_disk_map(c.dim, c.amplitude, c.winding, rng))
            .collect::<Result<Vec<_>>>()?;
        let d = associativity_defect(&ms[0], &ms[1], &ms[2], q)?;
        worst = worst.max(d.distance_to_integer);
        imaginary = imaginary.max(d.imaginary);
        defects.push(d.defect.round() as i64);
    }
    Ok(vec![
        Check::at_most("defect_distance_to_integer", worst, c.tolerance),
        Check::equals(
            "nonzero_integer_defects",
            defects.iter().filter(|&&d| d != 0).count() as i64,
            0,
        ),
        Check::at_most("gamma_imaginary_part", imaginary, c.tolerance),
    ])
}

fn run_wzw_mod1(c: &WzwMod1Config, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let q = QuadratureSpec::gauss(c.nodes);
    let exts = c
        .extensions
        .iter()
        .map(|s| parse_extension(s))
        .collect::<Result<Vec<_>>>()?;
    let mut worst: f64 = 0.0;
    for _ in 0..c.maps {
        let sphere = random_sphere_map(2, c.amplitude, rng)?;
        let values = exts
            .iter()
            .map(|e| wzw(&sphere, e, q))
            .collect::<Result<Vec<_>>>()?;
        for i in 0..values.len() {
            for j in i + 1..values.len() {
                worst = worst.max(distance_to_integer(values[i] - values[j]));
            }
        }
    }
    Ok(vec![Check::at_most(
        "pairwise_difference_distance_to_integer",
        worst,
        c.tolerance,
    )])
}

fn run_mf_identity(c: &MfIdentityConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let (fine_q, coarse_q) = (
        QuadratureSpec::gauss(c.nodes),
        QuadratureSpec::gauss(c.coarse_nodes),
    );
    let mut checks = Vec::new();
    for &n in &c.dims {
        let data = random_gauge_data(n, rng)?;
        let fine = mf_identity(&data, fine_q)?;
        let coarse = mf_identity(&data, coarse_q)?;
        let cxy = mf_cocycle(&data.a, &data.x, &data.y, fine_q)?;
        let cyx = mf_cocycle(&data.a, &data.y, &data.x, fine_q)?;
        let c2 = mf_cocycle(&data.a.scaled(2.0), &data.x, &data.y, fine_q)?;
        let scale = cxy.norm().max(1.0);
        checks.push(Check::at_most(
            format!("antisymmetry_n{n}"),
            (cxy + cyx).norm() / scale,
            c.exact_tolerance,
        ));
        checks.push(Check::at_most(
            format!("a_linearity_n{n}"),
            (c2 - cxy * 2.0).norm() / scale,
            c.exact_tolerance,
        ));
        if fine.largest_term <= c.vanishing {
            // every term vanishes identically (su(2)); the residual is absolute
            checks.push(Check::at_most(
                format!("residual_n{n}"),
                fine.residual,
                c.vanishing,
            ));
        } else {
            checks.push(Check::at_most(
                format!("relative_residual_n{n}"),
                fine.relative,
                c.tolerance,
            ));
            checks.push(Check::at_most(
                format!("refinement_n{n}"),
                fine.residual,
                coarse.residual.max(c.exact_tolerance * fine.largest_term),
            ));
        }
    }
    Ok(checks)
}

/// Every experiment's default config, as one TOML document with a table per
/// experiment.
pub fn defaults_toml() -> String {
    let mut doc = toml::Table::new();
    for e in Experiment::ALL {
        let value =
            toml::Value::try_from(ExperimentConfig::default_for(e)).expect("configs serialize");
        doc.insert(e.name().to_string(), value);
    }
    toml::to_string(&doc).expect("tables serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for e in Experiment::ALL {
            assert_eq!(Experiment::from_name(e.name()), Some(e));
            assert_eq!(ExperimentConfig::default_for(e).experiment(), e);
        }
    }

    #[test]
    fn config_parsing() {
        assert!(ExperimentConfig::parse(Experiment::Winding, "").is_err());
        assert!(ExperimentConfig::parse(Experiment::Winding, "bogus = 1").is_err());
        assert!(ExperimentConfig::parse(Experiment::Winding, "experiment = \"monopole\"").is_err());
        let cfg =
            ExperimentConfig::parse(Experiment::Winding, "experiment = \"winding\"\nnodes = 8")
                .unwrap();
        let ExperimentConfig::Winding(w) = cfg else {
            panic!()
        };
        assert_eq!(w.nodes, 8);
        assert!(ExperimentConfig::parse(Experiment::Bockstein, "covers = [3]").is_err());
        assert!(ExperimentConfig::parse(
            Experiment::WzwMod1,
            "extensions = [\"radial-linear\", \"cone\"]"
        )
        .is_err());
    }

    #[test]
    fn defaults_document_parses_back() {
        let doc: toml::Table = defaults_toml().parse().unwrap();
        for e in Experiment::ALL {
            let table = doc[e.name()].as_table().unwrap().clone();
            assert_eq!(
                ExperimentConfig::from_table(e, table).unwrap(),
                ExperimentConfig::default_for(e)
            );
        }
    }

    #[test]
    fn cheap_experiments_pass() {
        for e in [
            Experiment::CarCocycle,
            Experiment::Monopole,
            Experiment::SpectralFlow,
        ] {
            let out = run(&ExperimentConfig::default_for(e), 0).unwrap();
            assert!(out.report.pass, "{}", out.report.to_json());
        }
    }
}
