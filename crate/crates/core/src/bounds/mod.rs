//! Lower bounds on the nonnegative rank and the certificates behind them.

mod baselines;
mod certificate;
mod cover;
mod factorization;
mod report;

pub use baselines::{classic_rank_bound, nuclear_norm, numerical_rank, RANK_REL_TOL};
pub use certificate::{
    round_certificate, verify_certificate, Certificate, CertificateCheck, RoundedBound,
    EIGEN_SAFETY_MARGIN,
};
pub use cover::{
    maximal_rectangles, rectangle_cover_exact, CoverLimits, Rectangle, RectangleCover,
};
pub use factorization::{optimal_w_fixed_point_check, NonnegFactorization};
pub use report::{
    best_integer, bound_report, nu_plus_bound, BoundReport, LowerBounds, NuPlusBound,
    ReportOptions, CEIL_SLACK,
};
