//! Coherent-state quantization built on Delone perturbations of the natural numbers.

#![allow(
    // `!(x > 0.0)` is how NaN gets rejected along with the out-of-range values
    clippy::neg_cmp_op_on_partial_ord,
    // quadrature nodes and series coefficients are kept as published
    clippy::excessive_precision,
    clippy::needless_range_loop
)]

pub mod error;
pub mod figures;
pub mod gha;
pub mod moments;
pub mod numeric;
pub mod orthopoly;
pub mod quad;
pub mod quantize;
pub mod renorm;
pub mod sequence;
pub mod series;
pub mod specfun;
pub mod stats;

pub use error::{Error, Result};
pub use figures::{
    gha_dataset, measures, oscillating_moments, renormalization_gap, uniform_grid, Dataset,
};
pub use gha::{gha_curves, max_recurrence_error, GhaModel, GhaRow};
pub use moments::{
    asymptotic_mu, check_prop_conditions, hankel_determinants, moment_integral, mu_sequence,
    AsymptoticModel, MomentTable,
};
pub use num_complex::Complex64;
pub use orthopoly::{
    characteristic_polynomial, gauss_gram, gauss_rule, generating_function, monic_polys,
    renormalized_spectrum, roots_by_bisection, spectrum, truncated_position, PolySet, Spectrum,
};
pub use quantize::{
    auto_dim, coherent_state, ladder_matrices, lower_symbol, position_momentum, quantize_radial,
    resolution_check, resolution_check_base, uncertainty_product, CoherentState, FourierSymbol,
    LowerSymbol, Monomial, OperatorMatrix, RadialSymbol, Storage, Uncertainty,
};
pub use renorm::{
    compare_measures, nu_density, nu_density_expectation, renormalize, solved_measure_density,
    MeasureRow, RenormalizedSequence, SolvedDensity, SolvedMeasure,
};
pub use sequence::{
    beta_integers, certify_delone, make_sequence, BetaKind, DeloneCertificate, DeloneSequence,
    Factorials, Prefix, SequenceSpec,
};
pub use series::{exp_series, series_ratio, SeriesEval};
pub use specfun::{gamma, ln_gamma, pfq, pfq_ln, upper_incomplete_gamma, PfqParams};
pub use stats::{
    deformed_binomial_pmf, gamma_mean, i_m, i_m_composed, poisson_like_pmf, poisson_limit_distance,
    poisson_mean, xi, BinomialTable, DeformedBinomial,
};
