//! Classifiers: multinomial and one-vs-rest logistic regression, the
//! grouped-lasso path, CART, random forests and gradient boosting, plus
//! cross-validated grid search.

pub mod boosting;
pub mod forest;
pub mod grid;
pub mod lasso;
pub mod linear;
pub mod matrix;
pub mod model;
pub mod ovr;
pub mod tree;

pub use boosting::{fit_gradient_boosting, BoostConfig, BoostModel};
pub use forest::{fit_random_forest, ForestConfig, ForestModel};
pub use grid::{cv_scores, grid_points, grid_search_cv, GridPoint, GridSearchReport};
pub use lasso::{fit_multinomial_lr_lasso_path, LassoConfig, LassoModel};
pub use linear::{
    fit_binary_lr, fit_multinomial_lr, objective_and_gradient, ClassWeight, LinearModel,
    LogisticModel, LrConfig, Penalty,
};
pub use matrix::{argmax, check_labels, infer_n_classes, Matrix};
pub use model::{fit_model, Family, Model, ModelConfig, ModelDocument, FORMAT_VERSION};
pub use ovr::{one_vs_rest, OvrModel};
pub use tree::{fit_decision_tree, MaxFeatures, Node, Tree, TreeConfig, TreeModel};
