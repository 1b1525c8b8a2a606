//! Filter feature selection: Pearson chi-squared tests on contingency tables,
//! entropy and information gain in bits, top-k ranking and per-class
//! association matrices.

pub mod chi2;
pub mod entropy;
pub mod gamma;
pub mod selection;

pub use chi2::{bivariate, chi_square_test, contingency, BivariateEntry, ChiSquareResult, ContingencyTable};
pub use entropy::{crosstab_codes, entropy, information_gain, joint_entropy, mutual_information};
pub use gamma::{chi2_sf, gamma_p, gamma_q, ln_gamma};
pub use selection::{
    class_association_matrix, feature_crosstab, select_k_best, AssociationMatrix, FeatureScore,
    Scorer, Selection, SIGNIFICANCE,
};
