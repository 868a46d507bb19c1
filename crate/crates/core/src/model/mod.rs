//! The nine generative model classes, their mechanisms and parameter ranges.

mod mechanism;
pub mod normal;
mod outdegree;
mod supercritical;

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use mechanism::{AgingSpec, FitnessSpec, PrefAttachSpec};
pub use outdegree::{OutDegreePmf, DEFAULT_PMF_CSV};
pub use supercritical::{check_supercritical, SupercriticalFormula, SupercriticalityReport};

use crate::error::{Error, Result};

/// Generative model class. Discriminants are the class codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum ModelClass {
    /// Uniform attachment.
    U = 0,
    /// Affine preferential attachment.
    P = 1,
    /// Power-law fitness.
    FPl = 2,
    /// Exponential fitness.
    FExp = 3,
    /// Power-law fitness with lognormal aging.
    FPlA = 4,
    /// Exponential fitness with lognormal aging.
    FExpA = 5,
    /// Affine PA with uniform fitness.
    FUnifP = 6,
    /// Affine PA with lognormal aging.
    AP = 7,
    /// Affine PA, exponential fitness and lognormal aging.
    FExpAP = 8,
}

impl ModelClass {
    pub const COUNT: usize = 9;

    pub const ALL: [ModelClass; 9] = [
        ModelClass::U,
        ModelClass::P,
        ModelClass::FPl,
        ModelClass::FExp,
        ModelClass::FPlA,
        ModelClass::FExpA,
        ModelClass::FUnifP,
        ModelClass::AP,
        ModelClass::FExpAP,
    ];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Self::ALL.get(code as usize).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelClass::U => "U",
            ModelClass::P => "P",
            ModelClass::FPl => "F_pl",
            ModelClass::FExp => "F_exp",
            ModelClass::FPlA => "F_plA",
            ModelClass::FExpA => "F_expA",
            ModelClass::FUnifP => "F_unifP",
            ModelClass::AP => "AP",
            ModelClass::FExpAP => "F_expAP",
        }
    }

    pub fn has_aging(self) -> bool {
        matches!(
            self,
            ModelClass::FPlA | ModelClass::FExpA | ModelClass::AP | ModelClass::FExpAP
        )
    }

    pub fn has_pa(self) -> bool {
        matches!(
            self,
            ModelClass::P | ModelClass::FUnifP | ModelClass::AP | ModelClass::FExpAP
        )
    }

    pub fn has_fitness(self) -> bool {
        matches!(
            self,
            ModelClass::FPl
                | ModelClass::FExp
                | ModelClass::FPlA
                | ModelClass::FExpA
                | ModelClass::FUnifP
                | ModelClass::FExpAP
        )
    }

    /// Names of the free parameters, in sampling order.
    pub fn parameter_names(self) -> &'static [&'static str] {
        match self {
            ModelClass::U => &[],
            ModelClass::P => &["a", "b"],
            ModelClass::FPl => &["x_min", "tau"],
            ModelClass::FExp => &["lambda"],
            ModelClass::FPlA => &["x_min", "tau", "mu", "sigma"],
            ModelClass::FExpA => &["lambda", "mu", "sigma"],
            ModelClass::FUnifP => &["a", "b", "c", "d"],
            ModelClass::AP => &["a", "b", "mu", "sigma"],
            ModelClass::FExpAP => &["a", "b", "lambda", "mu", "sigma"],
        }
    }
}

impl fmt::Display for ModelClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Ok(code) = s.parse::<u8>() {
            return Self::from_code(code).ok_or_else(|| Error::invalid(format!("unknown class code {code}")));
        }
        Self::ALL
            .iter()
            .copied()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::invalid(format!("unknown model class {s:?}")))
    }
}

impl Serialize for ModelClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for ModelClass {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

// Sampling intervals per parameter.
const AB_RANGE: (f64, f64) = (1.0, 4.0);
const AP_A_RANGE: (f64, f64) = (3.3, 7.0);
const X_MIN_RANGE: (f64, f64) = (0.5, 1.0);
const TAU_RANGE: (f64, f64) = (2.0, 4.0);
const TAU_AGING_RANGE: (f64, f64) = (2.0, 2.7);
const LAMBDA_RANGE: (f64, f64) = (0.1, 3.0);
const LAMBDA_AGING_RANGE: (f64, f64) = (0.1, 1.0);
const LAMBDA_AP_LOWER: f64 = 0.1;
const MU_RANGE: (f64, f64) = (0.1, 3.0);
const C_RANGE: (f64, f64) = (0.1, 1.0);
const D_RANGE: (f64, f64) = (1.0, 5.0);
const AGING_SIGMA: f64 = 1.0;

/// Where a configuration's out-degree distribution came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PmfSource {
    Default,
    File(PathBuf),
}

/// How the offspring rate of a collapsed vertex is shared among the
/// branching-process nodes of its batch.
///
/// With `Divided` every member fires at `eta h f / M`, so a collapsed vertex
/// produces about `eta` offspring over its lifetime while it needs `M` of
/// them to open a successor; with aging this is subcritical unless
/// `E[eta] > E[M]`, and the fitness-aging classes go extinct for every
/// parameter in their sampling ranges. `Undivided` gives each member the
/// full rate `eta h f`, which makes the single-node supercriticality
/// condition the relevant one and lets in-range aging configurations
/// survive within a few attempts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BatchRate {
    #[default]
    Undivided,
    Divided,
}

impl BatchRate {
    /// Factor applied to a member's rate in a batch of `out_target` nodes.
    pub fn share(self, out_target: u32) -> f64 {
        match self {
            BatchRate::Undivided => 1.0,
            BatchRate::Divided => 1.0 / out_target.max(1) as f64,
        }
    }
}

/// One model class with concrete mechanism parameters.
#[derive(Debug, Clone)]
pub struct ModelConfig {
    class: ModelClass,
    fitness: FitnessSpec,
    aging: AgingSpec,
    pa: PrefAttachSpec,
    outdeg: Arc<OutDegreePmf>,
    outdeg_source: PmfSource,
    batch_rate: BatchRate,
}

impl PartialEq for ModelConfig {
    fn eq(&self, other: &Self) -> bool {
        self.class == other.class
            && self.fitness == other.fitness
            && self.aging == other.aging
            && self.pa == other.pa
            && self.outdeg_source == other.outdeg_source
            && self.batch_rate == other.batch_rate
            && *self.outdeg == *other.outdeg
    }
}

impl ModelConfig {
    /// Checks that the mechanisms match the class and every parameter is in
    /// its mathematical domain. Table ranges are not enforced here, see
    /// [`ModelConfig::within_sampling_ranges`].
    pub fn new(
        class: ModelClass,
        fitness: FitnessSpec,
        aging: AgingSpec,
        pa: PrefAttachSpec,
        outdeg: Arc<OutDegreePmf>,
    ) -> Result<Self> {
        fitness.validate()?;
        aging.validate()?;
        pa.validate()?;
        let fitness_ok = match class {
            ModelClass::U | ModelClass::P | ModelClass::AP => matches!(fitness, FitnessSpec::ConstantOne),
            ModelClass::FPl | ModelClass::FPlA => matches!(fitness, FitnessSpec::Pareto { .. }),
            ModelClass::FExp | ModelClass::FExpA | ModelClass::FExpAP => {
                matches!(fitness, FitnessSpec::Exponential { .. })
            }
            ModelClass::FUnifP => matches!(fitness, FitnessSpec::Uniform { .. }),
        };
        let aging_ok = class.has_aging() == aging.has_aging();
        let pa_ok = class.has_pa() == matches!(pa, PrefAttachSpec::Affine { .. });
        if !(fitness_ok && aging_ok && pa_ok) {
            return Err(Error::invalid(format!(
                "mechanisms {fitness:?}/{aging:?}/{pa:?} inconsistent with class {class}"
            )));
        }
        Ok(Self {
            class,
            fitness,
            aging,
            pa,
            outdeg,
            outdeg_source: PmfSource::Default,
            batch_rate: BatchRate::default(),
        })
    }

    /// Builds a configuration from named parameters (`a`, `b`, `x_min`, ...).
    pub fn from_params(
        class: ModelClass,
        params: &BTreeMap<String, f64>,
        outdeg: Arc<OutDegreePmf>,
    ) -> Result<Self> {
        let get = |name: &str| {
            params
                .get(name)
                .copied()
                .ok_or_else(|| Error::invalid(format!("class {class} requires parameter {name}")))
        };
        for key in params.keys() {
            if !class.parameter_names().contains(&key.as_str()) {
                return Err(Error::invalid(format!("class {class} has no parameter {key}")));
            }
        }
        let fitness = match class {
            ModelClass::U | ModelClass::P | ModelClass::AP => FitnessSpec::ConstantOne,
            ModelClass::FPl | ModelClass::FPlA => FitnessSpec::Pareto {
                x_min: get("x_min")?,
                tau: get("tau")?,
            },
            ModelClass::FExp | ModelClass::FExpA | ModelClass::FExpAP => FitnessSpec::Exponential {
                lambda: get("lambda")?,
            },
            ModelClass::FUnifP => FitnessSpec::Uniform {
                c: get("c")?,
                d: get("d")?,
            },
        };
        let aging = if class.has_aging() {
            AgingSpec::Lognormal {
                mu: get("mu")?,
                sigma: get("sigma")?,
            }
        } else {
            AgingSpec::None
        };
        let pa = if class.has_pa() {
            PrefAttachSpec::Affine {
                a: get("a")?,
                b: get("b")?,
            }
        } else {
            PrefAttachSpec::None
        };
        Self::new(class, fitness, aging, pa, outdeg)
    }

    pub fn with_pmf_source(mut self, source: PmfSource) -> Self {
        self.outdeg_source = source;
        self
    }

    pub fn with_batch_rate(mut self, batch_rate: BatchRate) -> Self {
        self.batch_rate = batch_rate;
        self
    }

    pub fn batch_rate(&self) -> BatchRate {
        self.batch_rate
    }

    pub fn class(&self) -> ModelClass {
        self.class
    }

    pub fn fitness(&self) -> &FitnessSpec {
        &self.fitness
    }

    pub fn aging(&self) -> &AgingSpec {
        &self.aging
    }

    pub fn pa(&self) -> &PrefAttachSpec {
        &self.pa
    }

    pub fn outdeg(&self) -> &OutDegreePmf {
        &self.outdeg
    }

    pub fn outdeg_shared(&self) -> Arc<OutDegreePmf> {
        self.outdeg.clone()
    }

    pub fn outdeg_source(&self) -> &PmfSource {
        &self.outdeg_source
    }

    /// Named parameter values in sampling order.
    pub fn params(&self) -> BTreeMap<String, f64> {
        let mut out = BTreeMap::new();
        if let PrefAttachSpec::Affine { a, b } = self.pa {
            out.insert("a".into(), a);
            out.insert("b".into(), b);
        }
        match self.fitness {
            FitnessSpec::ConstantOne => {}
            FitnessSpec::Pareto { x_min, tau } => {
                out.insert("x_min".into(), x_min);
                out.insert("tau".into(), tau);
            }
            FitnessSpec::Exponential { lambda } => {
                out.insert("lambda".into(), lambda);
            }
            FitnessSpec::Uniform { c, d } => {
                out.insert("c".into(), c);
                out.insert("d".into(), d);
            }
        }
        if let AgingSpec::Lognormal { mu, sigma } = self.aging {
            out.insert("mu".into(), mu);
            out.insert("sigma".into(), sigma);
        }
        out
    }

    /// Whether every parameter lies in the interval used by [`sample_config`].
    pub fn within_sampling_ranges(&self) -> bool {
        let inside = |x: f64, (lo, hi): (f64, f64)| x > lo && x < hi;
        let pa_ok = match (self.class, self.pa) {
            (_, PrefAttachSpec::None) => true,
            (ModelClass::AP, PrefAttachSpec::Affine { a, b }) => inside(a, AP_A_RANGE) && inside(b, AB_RANGE),
            (_, PrefAttachSpec::Affine { a, b }) => inside(a, AB_RANGE) && inside(b, AB_RANGE),
        };
        let fit_ok = match (self.class, self.fitness) {
            (_, FitnessSpec::ConstantOne) => true,
            (ModelClass::FPl, FitnessSpec::Pareto { x_min, tau }) => {
                inside(x_min, X_MIN_RANGE) && inside(tau, TAU_RANGE)
            }
            (_, FitnessSpec::Pareto { x_min, tau }) => inside(x_min, X_MIN_RANGE) && inside(tau, TAU_AGING_RANGE),
            (ModelClass::FExp, FitnessSpec::Exponential { lambda }) => inside(lambda, LAMBDA_RANGE),
            (ModelClass::FExpA, FitnessSpec::Exponential { lambda }) => inside(lambda, LAMBDA_AGING_RANGE),
            (_, FitnessSpec::Exponential { lambda }) => match self.pa {
                PrefAttachSpec::Affine { a, b } => inside(lambda, (LAMBDA_AP_LOWER, a + b / self.outdeg.mean())),
                PrefAttachSpec::None => false,
            },
            (_, FitnessSpec::Uniform { c, d }) => inside(c, C_RANGE) && inside(d, D_RANGE),
        };
        let aging_ok = match self.aging {
            AgingSpec::None => true,
            AgingSpec::Lognormal { mu, sigma } => inside(mu, MU_RANGE) && sigma == AGING_SIGMA,
        };
        pa_ok && fit_ok && aging_ok
    }

    /// Draws one fitness value.
    pub fn draw_fitness<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.fitness {
            FitnessSpec::ConstantOne => 1.0,
            spec => spec.quantile_unchecked(open_unit(rng)),
        }
    }

    pub fn draw_outdeg<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        self.outdeg.sample(rng.random::<f64>())
    }

    pub fn to_json(&self) -> ModelConfigJson {
        ModelConfigJson {
            class: self.class,
            params: self.params(),
            outdeg_pmf: match &self.outdeg_source {
                PmfSource::Default => DEFAULT_PMF_TAG.to_string(),
                PmfSource::File(p) => p.display().to_string(),
            },
            batch_rate: self.batch_rate,
        }
    }

    /// Rebuilds a configuration from its JSON form; relative PMF paths are
    /// resolved against `base_dir`.
    pub fn from_json(json: &ModelConfigJson, base_dir: &Path) -> Result<Self> {
        let (pmf, source) = if json.outdeg_pmf == DEFAULT_PMF_TAG {
            (OutDegreePmf::default_shared(), PmfSource::Default)
        } else {
            let path = PathBuf::from(&json.outdeg_pmf);
            let full = if path.is_absolute() { path.clone() } else { base_dir.join(&path) };
            (Arc::new(OutDegreePmf::from_path(&full)?), PmfSource::File(path))
        };
        Ok(Self::from_params(json.class, &json.params, pmf)?
            .with_pmf_source(source)
            .with_batch_rate(json.batch_rate))
    }
}

/// Serialized configuration: `{class, params{...}, outdeg_pmf, batch_rate}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfigJson {
    pub class: ModelClass,
    pub params: BTreeMap<String, f64>,
    pub outdeg_pmf: String,
    #[serde(default)]
    pub batch_rate: BatchRate,
}

/// Value of `outdeg_pmf` that refers to the shipped distribution.
pub const DEFAULT_PMF_TAG: &str = "default";

fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

fn uniform_in<R: Rng + ?Sized>(rng: &mut R, (lo, hi): (f64, f64)) -> f64 {
    lo + (hi - lo) * open_unit(rng)
}

/// Draws a configuration of `class` with every parameter independent and
/// uniform on its sampling interval. Aging always uses `sigma = 1`; for
/// `F_expAP` the upper bound of `lambda` is `a + b / E[M]` with the mean of
/// the supplied out-degree distribution.
pub fn sample_config<R: Rng + ?Sized>(class: ModelClass, outdeg: Arc<OutDegreePmf>, rng: &mut R) -> ModelConfig {
    let lognormal = |rng: &mut R| AgingSpec::Lognormal {
        mu: uniform_in(rng, MU_RANGE),
        sigma: AGING_SIGMA,
    };
    let affine = |rng: &mut R, a_range| PrefAttachSpec::Affine {
        a: uniform_in(rng, a_range),
        b: uniform_in(rng, AB_RANGE),
    };
    let pareto = |rng: &mut R, tau_range| {
        let x_min = uniform_in(rng, X_MIN_RANGE);
        FitnessSpec::Pareto {
            x_min,
            tau: uniform_in(rng, tau_range),
        }
    };
    let (fitness, aging, pa) = match class {
        ModelClass::U => (FitnessSpec::ConstantOne, AgingSpec::None, PrefAttachSpec::None),
        ModelClass::P => (FitnessSpec::ConstantOne, AgingSpec::None, affine(rng, AB_RANGE)),
        ModelClass::FPl => (pareto(rng, TAU_RANGE), AgingSpec::None, PrefAttachSpec::None),
        ModelClass::FExp => (
            FitnessSpec::Exponential {
                lambda: uniform_in(rng, LAMBDA_RANGE),
            },
            AgingSpec::None,
            PrefAttachSpec::None,
        ),
        ModelClass::FPlA => {
            let f = pareto(rng, TAU_AGING_RANGE);
            (f, lognormal(rng), PrefAttachSpec::None)
        }
        ModelClass::FExpA => {
            let f = FitnessSpec::Exponential {
                lambda: uniform_in(rng, LAMBDA_AGING_RANGE),
            };
            (f, lognormal(rng), PrefAttachSpec::None)
        }
        ModelClass::FUnifP => {
            let pa = affine(rng, AB_RANGE);
            let c = uniform_in(rng, C_RANGE);
            let d = uniform_in(rng, D_RANGE);
            (FitnessSpec::Uniform { c, d }, AgingSpec::None, pa)
        }
        ModelClass::AP => {
            let pa = affine(rng, AP_A_RANGE);
            (FitnessSpec::ConstantOne, lognormal(rng), pa)
        }
        ModelClass::FExpAP => {
            let pa = affine(rng, AB_RANGE);
            let PrefAttachSpec::Affine { a, b } = pa else { unreachable!() };
            let upper = a + b / outdeg.mean();
            let f = FitnessSpec::Exponential {
                lambda: uniform_in(rng, (LAMBDA_AP_LOWER, upper)),
            };
            (f, lognormal(rng), pa)
        }
    };
    ModelConfig::new(class, fitness, aging, pa, outdeg).expect("sampling ranges lie inside parameter domains")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn codes_and_names_are_a_bijection() {
        let names = ["U", "P", "F_pl", "F_exp", "F_plA", "F_expA", "F_unifP", "AP", "F_expAP"];
        for (code, name) in names.iter().enumerate() {
            let c = ModelClass::from_code(code as u8).unwrap();
            assert_eq!(c.name(), *name);
            assert_eq!(c.code() as usize, code);
            assert_eq!(name.parse::<ModelClass>().unwrap(), c);
        }
        assert!(ModelClass::from_code(9).is_none());
    }

    #[test]
    fn uniform_has_no_parameters() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cfg = sample_config(ModelClass::U, OutDegreePmf::default_shared(), &mut rng);
        assert!(cfg.params().is_empty());
    }

    #[test]
    fn fexpap_lambda_bound_uses_configured_mean() {
        let pmf = Arc::new(OutDegreePmf::new(&[(1, 0.5), (3, 0.5)]).unwrap());
        for seed in 0..200 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let cfg = sample_config(ModelClass::FExpAP, pmf.clone(), &mut rng);
            let p = cfg.params();
            let upper = p["a"] + p["b"] / 2.0;
            assert!(p["lambda"] > 0.1 && p["lambda"] < upper);
            assert!(cfg.within_sampling_ranges());
        }
    }

    #[test]
    fn sampling_is_seeded() {
        let draw = || {
            let mut rng = ChaCha8Rng::seed_from_u64(77);
            sample_config(ModelClass::P, OutDegreePmf::default_shared(), &mut rng).params()
        };
        assert_eq!(draw(), draw());
    }

    #[test]
    fn sampled_configs_are_consistent_and_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for class in ModelClass::ALL {
            for _ in 0..500 {
                let cfg = sample_config(class, OutDegreePmf::default_shared(), &mut rng);
                assert!(cfg.within_sampling_ranges(), "{class}: {:?}", cfg.params());
                let params = cfg.params();
                let names: Vec<&str> = params.keys().map(|s| s.as_str()).collect();
                let mut expected = class.parameter_names().to_vec();
                expected.sort();
                assert_eq!(names, expected);
                if class.has_aging() {
                    assert_eq!(cfg.params()["sigma"], 1.0);
                }
            }
        }
    }

    #[test]
    fn rejects_inconsistent_mechanisms() {
        let pmf = OutDegreePmf::default_shared();
        let r = ModelConfig::new(
            ModelClass::AP,
            FitnessSpec::Exponential { lambda: 1.0 },
            AgingSpec::Lognormal { mu: 1.0, sigma: 1.0 },
            PrefAttachSpec::Affine { a: 4.0, b: 1.0 },
            pmf,
        );
        assert!(r.is_err());
    }

    #[test]
    fn json_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let cfg = sample_config(ModelClass::FExpAP, OutDegreePmf::default_shared(), &mut rng);
        let text = serde_json::to_string(&cfg.to_json()).unwrap();
        let back: ModelConfigJson = serde_json::from_str(&text).unwrap();
        assert_eq!(ModelConfig::from_json(&back, Path::new(".")).unwrap(), cfg);
        assert!(text.contains("\"class\":\"F_expAP\""));
    }
}
