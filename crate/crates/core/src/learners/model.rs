//! The uniform model surface: one enum over every fitted family, a
//! parameter-map constructor and the versioned JSON document.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::boosting::{fit_gradient_boosting, BoostConfig, BoostModel};
use super::forest::{fit_random_forest, ForestConfig, ForestModel};
use super::lasso::{fit_multinomial_lr_lasso_path, LassoConfig, LassoModel};
use super::linear::{fit_multinomial_lr, LogisticModel, LrConfig};
use super::matrix::{argmax, Matrix};
use super::ovr::{one_vs_rest, OvrModel};
use super::tree::{fit_decision_tree, TreeConfig, TreeModel};
use crate::error::{Error, Result};
use crate::sampling::FoldPlan;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Lr,
    Lasso,
    Tree,
    RandomForest,
    GradientBoosting,
    Ovr,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Lr,
        Family::Lasso,
        Family::Tree,
        Family::RandomForest,
        Family::GradientBoosting,
        Family::Ovr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Lr => "lr",
            Family::Lasso => "lasso",
            Family::Tree => "tree",
            Family::RandomForest => "random_forest",
            Family::GradientBoosting => "gradient_boosting",
            Family::Ovr => "ovr",
        }
    }

    /// Accepts the canonical names plus a few common aliases.
    pub fn parse(s: &str) -> Result<Family> {
        let f = match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "lr" | "logistic" | "multinomial_lr" => Family::Lr,
            "lasso" | "glmnet" => Family::Lasso,
            "tree" | "cart" | "decision_tree" => Family::Tree,
            "random_forest" | "rf" | "forest" => Family::RandomForest,
            "gradient_boosting" | "xgboost" | "xgboost_like" | "gbt" | "boosting" => {
                Family::GradientBoosting
            }
            "ovr" | "one_vs_rest" => Family::Ovr,
            other => return Err(Error::Config(format!("unknown model family `{other}`"))),
        };
        Ok(f)
    }

    fn takes_seed(self) -> bool {
        matches!(self, Family::Tree | Family::RandomForest | Family::GradientBoosting)
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Python-style `None` values in grids mean "off".
fn normalize(params: &Map<String, Value>) -> Map<String, Value> {
    params
        .iter()
        .map(|(k, v)| {
            let v = match (k.as_str(), v) {
                ("class_weight", Value::Null) => Value::from("uniform"),
                ("penalty", Value::Null) => Value::from("none"),
                ("penalty", Value::String(s)) => Value::from(s.to_ascii_lowercase()),
                _ => v.clone(),
            };
            (k.clone(), v)
        })
        .collect()
}

fn build<T: Serialize + serde::de::DeserializeOwned + Default>(params: &Map<String, Value>) -> Result<T> {
    let mut base = match serde_json::to_value(T::default())? {
        Value::Object(m) => m,
        _ => unreachable!("configs serialize to objects"),
    };
    base.extend(normalize(params));
    serde_json::from_value(Value::Object(base)).map_err(|e| Error::Config(e.to_string()))
}

/// A fully resolved configuration of one family.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ModelConfig {
    Lr(LrConfig),
    Lasso(LassoConfig),
    Tree(TreeConfig),
    RandomForest(ForestConfig),
    GradientBoosting(BoostConfig),
    Ovr(LrConfig),
}

impl ModelConfig {
    /// Resolves a parameter map over `family`'s config fields. `seed` fills
    /// in the seed of seeded families unless `params` sets one.
    pub fn resolve(family: Family, params: &Map<String, Value>, seed: u64) -> Result<Self> {
        let mut params = params.clone();
        if family.takes_seed() && !params.contains_key("seed") {
            params.insert("seed".into(), Value::from(seed));
        }
        Ok(match family {
            Family::Lr => ModelConfig::Lr(build(&params)?),
            Family::Lasso => ModelConfig::Lasso(build(&params)?),
            Family::Tree => ModelConfig::Tree(build(&params)?),
            Family::RandomForest => ModelConfig::RandomForest(build(&params)?),
            Family::GradientBoosting => ModelConfig::GradientBoosting(build(&params)?),
            Family::Ovr => ModelConfig::Ovr(build(&params)?),
        })
    }

    /// Identical keys fit identical models.
    pub fn fit_key(&self) -> String {
        let mut c = self.clone();
        if let ModelConfig::Lr(cfg) | ModelConfig::Ovr(cfg) = &mut c {
            cfg.solver = None;
        }
        serde_json::to_string(&c).expect("configs serialize")
    }

    /// `folds` drive the lasso's λ selection and are ignored otherwise.
    pub fn fit(&self, x: &Matrix, y: &[u8], folds: Option<&FoldPlan>) -> Result<Model> {
        Ok(match self {
            ModelConfig::Lr(c) => Model::Lr(fit_multinomial_lr(x, y, c)?),
            ModelConfig::Lasso(c) => Model::Lasso(fit_multinomial_lr_lasso_path(x, y, c, folds)?),
            ModelConfig::Tree(c) => Model::Tree(fit_decision_tree(x, y, c)?),
            ModelConfig::RandomForest(c) => Model::RandomForest(fit_random_forest(x, y, c)?),
            ModelConfig::GradientBoosting(c) => Model::GradientBoosting(fit_gradient_boosting(x, y, c)?),
            ModelConfig::Ovr(c) => Model::Ovr(one_vs_rest(x, y, c)?),
        })
    }
}

/// Resolves and fits in one step.
pub fn fit_model(
    family: Family,
    params: &Map<String, Value>,
    seed: u64,
    x: &Matrix,
    y: &[u8],
    folds: Option<&FoldPlan>,
) -> Result<Model> {
    ModelConfig::resolve(family, params, seed)?.fit(x, y, folds)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Model {
    Lr(LogisticModel),
    Lasso(LassoModel),
    Tree(TreeModel),
    RandomForest(ForestModel),
    GradientBoosting(BoostModel),
    Ovr(OvrModel),
}

impl Model {
    pub fn family(&self) -> Family {
        match self {
            Model::Lr(_) => Family::Lr,
            Model::Lasso(_) => Family::Lasso,
            Model::Tree(_) => Family::Tree,
            Model::RandomForest(_) => Family::RandomForest,
            Model::GradientBoosting(_) => Family::GradientBoosting,
            Model::Ovr(_) => Family::Ovr,
        }
    }

    pub fn n_classes(&self) -> usize {
        match self {
            Model::Lr(m) => m.n_classes,
            Model::Lasso(m) => m.n_classes,
            Model::Tree(m) => m.n_classes,
            Model::RandomForest(m) => m.n_classes,
            Model::GradientBoosting(m) => m.n_classes,
            Model::Ovr(m) => m.n_classes,
        }
    }

    pub fn feature_names(&self) -> &[String] {
        match self {
            Model::Lr(m) => &m.feature_names,
            Model::Lasso(m) => &m.feature_names,
            Model::Tree(m) => &m.feature_names,
            Model::RandomForest(m) => &m.feature_names,
            Model::GradientBoosting(m) => &m.feature_names,
            Model::Ovr(m) => &m.feature_names,
        }
    }

    pub fn proba_row(&self, row: &[f64]) -> Vec<f64> {
        match self {
            Model::Lr(m) => m.linear.proba_row(row),
            Model::Lasso(m) => m.linear.proba_row(row),
            Model::Tree(m) => m.tree.leaf(row).to_vec(),
            Model::RandomForest(m) => m.proba_row(row),
            Model::GradientBoosting(m) => m.proba_row(row),
            Model::Ovr(m) => m.proba_row(row),
        }
    }

    /// Linear predictors for the linear families, raw boosting scores, and
    /// class distributions for the tree families.
    pub fn scores_row(&self, row: &[f64]) -> Vec<f64> {
        match self {
            Model::Lr(m) => m.linear.scores_row(row),
            Model::Lasso(m) => m.linear.scores_row(row),
            Model::GradientBoosting(m) => m.scores_row(row),
            Model::Ovr(m) => m.scores_row(row),
            Model::Tree(_) | Model::RandomForest(_) => self.proba_row(row),
        }
    }

    /// Forests take the majority vote of their trees; every other family
    /// predicts the most probable class.
    pub fn predict_row(&self, row: &[f64]) -> u8 {
        match self {
            Model::RandomForest(m) => m.predict_row(row),
            _ => argmax(&self.proba_row(row)) as u8,
        }
    }

    fn per_row<T: Send>(&self, x: &Matrix, f: impl Fn(&[f64]) -> T + Sync) -> Result<Vec<T>> {
        x.check_features(self.feature_names())?;
        Ok((0..x.n_rows()).into_par_iter().map(|i| f(x.row(i))).collect())
    }

    pub fn predict(&self, x: &Matrix) -> Result<Vec<u8>> {
        self.per_row(x, |r| self.predict_row(r))
    }

    pub fn predict_proba(&self, x: &Matrix) -> Result<Vec<Vec<f64>>> {
        self.per_row(x, |r| self.proba_row(r))
    }

    pub fn decision_scores(&self, x: &Matrix) -> Result<Vec<Vec<f64>>> {
        self.per_row(x, |r| self.scores_row(r))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub format_version: u32,
    pub model: Model,
}

impl ModelDocument {
    pub fn new(model: Model) -> Self {
        ModelDocument {
            format_version: FORMAT_VERSION,
            model,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: ModelDocument = serde_json::from_str(s)?;
        if doc.format_version != FORMAT_VERSION {
            return Err(Error::Config(format!(
                "model format version {} is not supported (expected {FORMAT_VERSION})",
                doc.format_version
            )));
        }
        Ok(doc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn toy() -> (Matrix, Vec<u8>) {
        let rows: Vec<Vec<f64>> = (0..45).map(|i| vec![f64::from(i % 3), f64::from(i % 5)]).collect();
        let y = (0..45).map(|i| ((i % 3 + i % 5 / 4) % 3) as u8).collect();
        (Matrix::from_rows(&rows).unwrap(), y)
    }

    #[test]
    fn every_family_round_trips() {
        let (x, y) = toy();
        for fam in Family::ALL {
            let params = match fam {
                Family::RandomForest => json!({"n_estimators": 3}),
                Family::GradientBoosting => json!({"n_estimators": 3}),
                Family::Lasso => json!({"n_lambda": 5}),
                _ => json!({}),
            };
            let m = fit_model(fam, params.as_object().unwrap(), 1, &x, &y, None).unwrap();
            assert_eq!(m.family(), fam);
            let doc = ModelDocument::new(m.clone());
            let back = ModelDocument::from_json(&doc.to_json().unwrap()).unwrap();
            assert_eq!(back.model.predict(&x).unwrap(), m.predict(&x).unwrap());
            assert_eq!(Family::parse(fam.name()).unwrap(), fam);
        }
    }

    #[test]
    fn grid_style_params() {
        let (x, y) = toy();
        let p = json!({"C": 0.1, "penalty": "L2", "class_weight": null, "solver": "lbfgs"});
        assert!(fit_model(Family::Lr, p.as_object().unwrap(), 0, &x, &y, None).is_ok());
        let bad = json!({"depth": 3});
        let err = fit_model(Family::Tree, bad.as_object().unwrap(), 0, &x, &y, None).unwrap_err();
        assert_eq!(err.kind(), crate::ErrorKind::Config);
    }

    #[test]
    fn wrong_version_rejected() {
        let (x, y) = toy();
        let m = fit_model(Family::Tree, &Map::new(), 0, &x, &y, None).unwrap();
        let mut v = serde_json::to_value(ModelDocument::new(m)).unwrap();
        v["format_version"] = json!(99);
        assert!(ModelDocument::from_json(&v.to_string()).is_err());
    }
}
