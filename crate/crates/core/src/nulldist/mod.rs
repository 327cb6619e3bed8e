//! Limit laws of the statistics: spectra, covariance kernels, moment
//! generating functions, distribution functions and critical values.

mod cdf;
mod mgf;
mod spectral;

pub use cdf::{critical_value, null_cdf, MIN_ALPHA, null_pdf, null_tail, p_value, watson_cdf, watson_density, SeriesValue};
pub use mgf::{gad_mgf_order_three, gad_mgf_order_two, ln_abs_mgf, mgf, solve_eta, MgfEvaluation, MgfMethod};
pub use spectral::{
    covariance_kernel, distinct_eigenvalues, eigenfunction, eigenvalue, eigenvalue_trace, gad_eigenvalue_exact,
    mgf_infinite_product, multiplicity, null_moments,
};
