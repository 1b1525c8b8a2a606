use std::fs;
use std::path::{Path, PathBuf};

use mortband::pipeline::presets::{self, Preset};
use mortband::stats::Scorer;
use mortband::{Error, Result};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

/// Variables tested against the target by `analyze` unless configured.
pub const BIVARIATE_VARIABLES: [&str; 17] = [
    "PRIORITY",
    "MARRIED",
    "SEX",
    "RACE",
    "AGE_GROUP",
    "BMI_RANGE",
    "A1C_RANGE",
    "SERUMALB_RANGE",
    "SERUMCRE_RANGE",
    "N_IP_RANGE",
    "N_OP_RANGE",
    "SYSTOLIC_RANGE",
    "DIASTOLIC_RANGE",
    "TRI_RANGE",
    "LDL_RANGE",
    "HDL_RANGE",
    "FRAILITY_GROUP",
];

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Seeds {
    pub split: Option<u64>,
    pub balance: Option<u64>,
    pub model: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectorSpec {
    pub method: Scorer,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    /// Names the model file and report directory.
    pub name: String,
    pub family: String,
    #[serde(default)]
    pub params: Map<String, Value>,
    #[serde(default)]
    pub grid: Option<Map<String, Value>>,
    #[serde(default)]
    pub selector: Option<SelectorSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalyzeConfig {
    pub variables: Vec<String>,
    pub pairs: Vec<[String; 2]>,
}

impl Default for AnalyzeConfig {
    fn default() -> Self {
        AnalyzeConfig {
            variables: BIVARIATE_VARIABLES.iter().map(|s| (*s).to_owned()).collect(),
            pairs: vec![
                ["PRIORITY".into(), "FRAILITY_GROUP".into()],
                ["MARRIED".into(), "RACE".into()],
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub input: Option<PathBuf>,
    #[serde(default = "default_preset")]
    pub preset: String,
    /// A preset JSON file; replaces `preset` when set.
    #[serde(default)]
    pub preset_file: Option<PathBuf>,
    #[serde(default, skip_serializing)]
    pub out: Option<PathBuf>,
    #[serde(default = "default_test_fraction")]
    pub test_fraction: f64,
    #[serde(default)]
    pub seeds: Seeds,
    #[serde(default = "default_folds")]
    pub cv_folds: usize,
    #[serde(default)]
    pub analyze: AnalyzeConfig,
    #[serde(default)]
    pub models: Vec<ModelSpec>,
}

fn default_preset() -> String {
    presets::VETERANS_T2DM.to_owned()
}

fn default_test_fraction() -> f64 {
    0.25
}

fn default_folds() -> usize {
    10
}

/// Flag values that override the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed_split: Option<u64>,
    pub seed_balance: Option<u64>,
    pub seed_model: Option<u64>,
}

impl RunConfig {
    /// Reads a config file; relative paths inside it are taken from the
    /// file's directory, and output defaults to `out/` beside it.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let rebase = |p: &mut Option<PathBuf>| {
            if let Some(q) = p.as_mut().filter(|q| q.is_relative()) {
                *q = base.join(&*q);
            }
        };
        rebase(&mut cfg.input);
        rebase(&mut cfg.preset_file);
        rebase(&mut cfg.out);
        cfg.out.get_or_insert_with(|| base.join("out"));
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if o.input.is_some() {
            self.input.clone_from(&o.input);
        }
        if o.out.is_some() {
            self.out.clone_from(&o.out);
        }
        self.seeds.split = o.seed_split.or(self.seeds.split);
        self.seeds.balance = o.seed_balance.or(self.seeds.balance);
        self.seeds.model = o.seed_model.or(self.seeds.model);
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::Config(format!("test_fraction {} not in (0, 1)", self.test_fraction)));
        }
        if self.cv_folds < 2 {
            return Err(Error::Config("cv_folds must be at least 2".into()));
        }
        let mut names = std::collections::HashSet::new();
        for m in &self.models {
            if m.name.is_empty() || m.name.contains(['/', '\\']) || !names.insert(&m.name) {
                return Err(Error::Config(format!("model name `{}` is empty, repeated or not a plain file name", m.name)));
            }
            mortband::learners::Family::parse(&m.family)?;
        }
        Ok(())
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    pub fn input(&self) -> Result<&Path> {
        self.input
            .as_deref()
            .ok_or_else(|| Error::Config("no input file (set `input` or pass --input)".into()))
    }

    pub fn seed(&self, which: &str) -> Result<u64> {
        let s = match which {
            "split" => self.seeds.split,
            "balance" => self.seeds.balance,
            _ => self.seeds.model,
        };
        s.ok_or_else(|| Error::Config(format!("seed `{which}` is not set (seeds.{which} or --seed-{which})")))
    }

    pub fn preset(&self) -> Result<Preset> {
        match &self.preset_file {
            Some(p) => {
                let text = fs::read_to_string(p)
                    .map_err(|e| Error::Config(format!("cannot read preset {}: {e}", p.display())))?;
                serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", p.display())))
            }
            None => presets::by_name(&self.preset),
        }
    }
}
