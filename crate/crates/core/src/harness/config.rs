// Copyright 2026 The spinloc Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dynamics::{default_grid, linear_grid, log_grid, DEFAULT_DIM_CAP};
use crate::error::{config, Error, Result};
use crate::lrbounds::{FFunction, MetricMode};
use crate::models::{
    apply_sparse_perturbation, build_ising_hamiltonian, build_xy_hamiltonian, sample_sequence, stream_id, DisorderSpec,
    Distribution, Interaction, IsingParams, SparsePerturbation, StreamFamily, XyParams,
};
use crate::operator::{LocalOperator, Site};

fn constant(c: f64) -> Distribution {
    Distribution::Constant { c }
}

fn unit() -> Distribution {
    constant(1.0)
}

fn zero() -> Distribution {
    constant(0.0)
}

fn symmetric_uniform() -> Distribution {
    Distribution::Uniform { a: -1.0, b: 1.0 }
}

fn one() -> f64 {
    1.0
}

/// Disordered Hamiltonian family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    /// XY chain on `[0, n]`.
    Xy {
        n: usize,
        lambda: f64,
        #[serde(default = "unit")]
        mu: Distribution,
        #[serde(default = "zero")]
        gamma: Distribution,
        #[serde(default = "symmetric_uniform")]
        field: Distribution,
    },
    /// Ising chain on `[0, n]`.
    Ising {
        n: usize,
        #[serde(default = "symmetric_uniform")]
        j: Distribution,
        #[serde(default = "symmetric_uniform")]
        transverse: Distribution,
        #[serde(default = "one")]
        gamma_scale: f64,
        #[serde(default = "symmetric_uniform")]
        h: Distribution,
    },
}

impl ModelSpec {
    /// The configured `n`.
    pub fn n(&self) -> usize {
        match self {
            ModelSpec::Xy { n, .. } | ModelSpec::Ising { n, .. } => *n,
        }
    }

    fn distributions(&self) -> Vec<&Distribution> {
        match self {
            ModelSpec::Xy { mu, gamma, field, .. } => vec![mu, gamma, field],
            ModelSpec::Ising { j, transverse, h, .. } => vec![j, transverse, h],
        }
    }

    /// XY parameters on `[0, n]` for one realization.
    pub fn xy_params(&self, n: usize, seed: u64, realization: u64) -> Result<XyParams<f64>> {
        let ModelSpec::Xy { lambda, mu, gamma, field, .. } = self else {
            return config("model is not an XY chain");
        };
        let draw = |d: &Distribution, fam, len| draw(d, seed, realization, fam, len);
        Ok(XyParams {
            n,
            mu: draw(mu, StreamFamily::Couplings, n)?,
            gamma: draw(gamma, StreamFamily::Anisotropy, n)?,
            omega: draw(field, StreamFamily::Fields, n + 1)?,
            lambda: *lambda,
        })
    }

    /// Ising parameters on `[0, n]` for one realization.
    pub fn ising_params(&self, n: usize, seed: u64, realization: u64) -> Result<IsingParams<f64>> {
        let ModelSpec::Ising { j, transverse, gamma_scale, h, .. } = self else {
            return config("model is not an Ising chain");
        };
        let draw = |d: &Distribution, fam, len| draw(d, seed, realization, fam, len);
        Ok(IsingParams {
            a: 0,
            b: n as Site,
            j: draw(j, StreamFamily::IsingCouplings, n)?,
            transverse: draw(transverse, StreamFamily::TransverseFields, n + 1)?,
            gamma_scale: *gamma_scale,
            h: draw(h, StreamFamily::LongitudinalFields, n + 1)?,
        })
    }
}

fn draw(d: &Distribution, seed: u64, realization: u64, family: StreamFamily, len: usize) -> Result<Vec<f64>> {
    if len == 0 {
        return Ok(Vec::new());
    }
    let spec = DisorderSpec { distribution: *d, seed, stream_id: stream_id(realization, family) };
    Ok(sample_sequence(&spec, len)?.values)
}

/// `Σ_x δ_x Δ Z_x Z_{x+1}` with `P(δ_x = 0) = p_zero`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationSpec {
    pub p_zero: f64,
    #[serde(default = "one")]
    pub strength: f64,
}

impl PerturbationSpec {
    /// The perturbation of one realization on the chain `[0, n]`.
    pub fn draw(&self, n: usize, seed: u64, realization: u64) -> Result<SparsePerturbation<f64>> {
        let chain = crate::operator::Chain::qubits(0, n as Site)?;
        let mask = draw(&Distribution::Bernoulli { p_zero: self.p_zero }, seed, realization, StreamFamily::Mask, n)?;
        let delta = mask.iter().map(|&v| v as u8).collect();
        SparsePerturbation::zz(&chain, delta, self.p_zero, self.strength)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    /// Linear below 1, log-spaced above.
    #[default]
    Default,
    Linear,
    Log,
}

/// Sampled times, in many-body units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default)]
    pub kind: GridKind,
    pub t_max: f64,
    pub points: usize,
    /// First positive time of a log grid.
    #[serde(default)]
    pub t_min: Option<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { kind: GridKind::Default, t_max: 1e3, points: 1000, t_min: None }
    }
}

impl GridSpec {
    pub fn times(&self) -> Vec<f64> {
        match self.kind {
            GridKind::Default => default_grid(self.t_max, self.points),
            GridKind::Linear => linear_grid(self.t_max, self.points),
            GridKind::Log => log_grid(self.t_min.unwrap_or(1e-2), self.t_max, self.points.saturating_sub(1)),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.t_max > 0.0 && self.t_max.is_finite()) || self.points < 2 {
            return config("grid needs t_max > 0 and at least 2 points");
        }
        if let Some(t) = self.t_min {
            if !(t > 0.0 && t < self.t_max) {
                return config("grid t_min must lie in (0, t_max)");
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    #[default]
    ManyBody,
    /// Jordan–Wigner kernel; XY chains only.
    OneBody,
}

/// Normalization `χ(|X|)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Chi {
    #[default]
    FourPow,
    One,
}

impl Chi {
    pub fn value(self, k: usize) -> f64 {
        match self {
            Chi::FourPow => crate::dynamics::chi_four_pow(k),
            Chi::One => 1.0,
        }
    }
}

fn default_resamples() -> usize {
    1000
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalizationSpec {
    #[serde(default)]
    pub engine: Engine,
    /// Overrides the model's `n`.
    #[serde(default)]
    pub n: Option<usize>,
    /// `X = {x}`; `Y = {x + d}` for each distance.
    #[serde(default)]
    pub x: Site,
    pub distances: Vec<u64>,
    #[serde(default)]
    pub beta: f64,
    #[serde(default)]
    pub chi: Chi,
    #[serde(default = "default_resamples")]
    pub bootstrap: usize,
    /// Polish one-body kernel maxima between grid points.
    #[serde(default = "yes")]
    pub refine: bool,
}

/// Thresholds `ε_n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EpsilonSchedule {
    Fixed { value: f64 },
    /// `ε_n = e^{−α η n}`.
    Exponential { alpha: f64, eta: f64 },
}

impl EpsilonSchedule {
    pub fn from_scaling(sp: &ScalingParams) -> Self {
        EpsilonSchedule::Exponential { alpha: sp.alpha, eta: sp.eta }
    }

    pub fn at(&self, n: usize) -> f64 {
        match *self {
            EpsilonSchedule::Fixed { value } => value,
            EpsilonSchedule::Exponential { alpha, eta } => (-alpha * eta * n as f64).exp(),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            EpsilonSchedule::Fixed { value } if !(value > 0.0) => config("epsilon must be positive"),
            EpsilonSchedule::Exponential { alpha, eta } if !(alpha > 0.0 && eta > 0.0) => {
                config("epsilon schedule needs alpha > 0 and eta > 0")
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransmissionSpec {
    /// Chain sizes `n`, each on `[0, n]`.
    pub sizes: Vec<usize>,
    /// Falls back to the `scaling` section when absent.
    #[serde(default)]
    pub epsilon: Option<EpsilonSchedule>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GapSpec {
    /// Thresholds `δ` of the empirical curve.
    #[serde(default)]
    pub deltas: Option<Vec<f64>>,
    /// Smallest positive curve points used in the power-law fit.
    #[serde(default = "default_tail")]
    pub tail_points: usize,
}

fn default_tail() -> usize {
    8
}

impl GapSpec {
    pub fn deltas(&self) -> Vec<f64> {
        match &self.deltas {
            Some(d) => d.clone(),
            None => log_grid(1e-6, 1.0, 31).into_iter().skip(1).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiomSpec {
    /// Radius reported in the summary table.
    #[serde(default = "default_radius")]
    pub radius: usize,
}

fn default_radius() -> usize {
    3
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LrBoundSpec {
    pub intervals: Vec<(Site, Site)>,
    #[serde(default)]
    pub f: FFunction,
    #[serde(default)]
    pub metric: MetricMode,
    pub x: Vec<Site>,
    pub y: Vec<Site>,
}

/// Parameters of the transmission-time scaling constraint and the proof-side knobs
/// recorded alongside them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingParams {
    pub alpha: f64,
    #[serde(default)]
    pub beta: f64,
    pub gamma: f64,
    pub eta: f64,
    pub p_zero: f64,
    #[serde(default)]
    pub theta: Option<f64>,
    #[serde(default)]
    pub sigma: Option<f64>,
    #[serde(default)]
    pub lambda_split: Option<f64>,
    #[serde(default)]
    pub nu: Option<f64>,
    #[serde(default)]
    pub xi: Option<f64>,
    #[serde(default)]
    pub kappa: Option<f64>,
}

impl ScalingParams {
    /// Range checks; `alpha >= 1/3` is accepted and reported out of scope.
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) {
            return config("alpha must be positive");
        }
        if !(self.beta >= 0.0) || !(self.gamma > 0.0) || !(self.eta > 0.0) {
            return config("need beta >= 0, gamma > 0, eta > 0");
        }
        if !(self.p_zero > 0.0 && self.p_zero <= 1.0) {
            return config("p_zero must lie in (0, 1]");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub dir: Option<PathBuf>,
}

/// One experiment: a model family, a disorder ensemble and the sections
/// consumed by the individual runners.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    pub realizations: usize,
    pub model: ModelSpec,
    #[serde(default)]
    pub perturbation: Option<PerturbationSpec>,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub localization: Option<LocalizationSpec>,
    #[serde(default)]
    pub transmission: Option<TransmissionSpec>,
    #[serde(default)]
    pub gaps: Option<GapSpec>,
    #[serde(default)]
    pub lioms: Option<LiomSpec>,
    #[serde(default)]
    pub lrbound: Option<LrBoundSpec>,
    #[serde(default)]
    pub scaling: Option<ScalingParams>,
    #[serde(default)]
    pub output: OutputSpec,
}

impl ExperimentConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&s)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.realizations == 0 {
            return config("realizations must be at least 1");
        }
        for d in self.model.distributions() {
            d.validate()?;
        }
        if let ModelSpec::Ising { gamma_scale, .. } = self.model {
            if !gamma_scale.is_finite() {
                return config("gamma_scale must be finite");
            }
        }
        if let Some(p) = &self.perturbation {
            if !(0.0..=1.0).contains(&p.p_zero) || !p.strength.is_finite() {
                return config("perturbation needs p_zero in [0, 1] and a finite strength");
            }
        }
        self.grid.validate()?;
        if let Some(l) = &self.localization {
            if l.distances.is_empty() || l.distances.contains(&0) {
                return config("localization distances must be nonempty and positive");
            }
            if !(l.beta >= 0.0) {
                return config("beta must be nonnegative");
            }
            if l.bootstrap == 0 {
                return config("bootstrap needs at least one resample");
            }
        }
        if let Some(t) = &self.transmission {
            if t.sizes.iter().any(|&n| n == 0) {
                return config("transmission sizes must be positive");
            }
            match (&t.epsilon, &self.scaling) {
                (Some(e), _) => e.validate()?,
                (None, Some(sp)) => sp.validate()?,
                (None, None) => return config("transmission needs an epsilon schedule or a scaling section"),
            }
        }
        if let Some(sp) = &self.scaling {
            sp.validate()?;
        }
        if let Some(lr) = &self.lrbound {
            lr.f.validate()?;
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Epsilon schedule of the transmission sweep.
    pub fn epsilon_schedule(&self) -> Result<EpsilonSchedule> {
        let t = self.transmission.as_ref().ok_or_else(|| Error::Config("missing [transmission] section".into()))?;
        match (&t.epsilon, &self.scaling) {
            (Some(e), _) => Ok(*e),
            (None, Some(sp)) => Ok(EpsilonSchedule::from_scaling(sp)),
            (None, None) => config("transmission needs an epsilon schedule or a scaling section"),
        }
    }

    /// Interaction and Hamiltonian of one realization on `[0, n]`,
    /// including the sparse perturbation when configured.
    pub fn build(&self, n: usize, realization: u64) -> Result<(Interaction<f64>, LocalOperator<f64>)> {
        check_cap(n)?;
        let (base, h) = match &self.model {
            ModelSpec::Xy { .. } => build_xy_hamiltonian(&self.model.xy_params(n, self.seed, realization)?)?,
            ModelSpec::Ising { .. } => build_ising_hamiltonian(&self.model.ising_params(n, self.seed, realization)?)?,
        };
        match &self.perturbation {
            None => Ok((base, h)),
            Some(p) => {
                let inter = apply_sparse_perturbation(&base, &p.draw(n, self.seed, realization)?)?;
                let h = inter.hamiltonian()?;
                Ok((inter, h))
            }
        }
    }
}

/// Rejects chains whose Hilbert space exceeds the dense cap.
pub fn check_cap(n: usize) -> Result<()> {
    let dim = 1usize.checked_shl(n as u32 + 1).unwrap_or(usize::MAX);
    if n >= 62 || dim > DEFAULT_DIM_CAP {
        return Err(Error::Resource(format!("chain [0, {n}] has dimension above {DEFAULT_DIM_CAP}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
name = "t"
seed = 3
realizations = 2
[model]
kind = "xy"
n = 4
lambda = 2.0
"#;

    #[test]
    fn minimal_config_uses_defaults() {
        let cfg = ExperimentConfig::from_toml_str(MINIMAL).unwrap();
        assert_eq!(cfg.grid, GridSpec::default());
        let p = cfg.model.xy_params(4, cfg.seed, 0).unwrap();
        assert_eq!(p.mu, vec![1.0; 4]);
        assert!(p.omega.iter().all(|w| (-1.0..1.0).contains(w)));
        let again = ExperimentConfig::from_toml_str(&cfg.to_toml_string().unwrap()).unwrap();
        assert_eq!(again.hash(), cfg.hash());
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let zero_r = MINIMAL.replace("realizations = 2", "realizations = 0");
        assert!(matches!(ExperimentConfig::from_toml_str(&zero_r), Err(Error::Config(_))));
        let unknown = format!("{MINIMAL}\nbogus = 1\n");
        assert!(ExperimentConfig::from_toml_str(&unknown).is_err());
        assert!(matches!(check_cap(20), Err(Error::Resource(_))));
    }

    #[test]
    fn longer_chains_extend_shorter_draws() {
        let cfg = ExperimentConfig::from_toml_str(MINIMAL).unwrap();
        let a = cfg.model.xy_params(8, 1, 5).unwrap();
        let b = cfg.model.xy_params(200, 1, 5).unwrap();
        assert_eq!(a.omega[..], b.omega[..9]);
    }
}
