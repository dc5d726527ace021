//! Numerical backbone: adaptive Gauss–Kronrod quadrature on finite and
//! semi-infinite intervals, the angle-averaged free resolvent, the Feynman
//! parametrization, and power-law / extrapolation fitting.

mod adaptive;
mod fit;
mod resolvent;

pub use adaptive::{integrate_2d, integrate_adaptive, Interval, Quadrature, QuadratureBudget};
pub use fit::{fit_power_law, geometric_grid, richardson, PowerLawFit, Richardson};
pub use resolvent::{
    angle_averaged_resolvent, feynman_combine, resolvent_bracket_over_k2, small_k_curvature,
};
