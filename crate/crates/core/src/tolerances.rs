//! Numerical thresholds of the acceptance criteria, in one place so the
//! acceptance target can pin them.

/// Eigenvalues at or below this count as kernel.
pub const KERNEL: f64 = 1e-10;
/// Kernel vectors must lie in the BVMD span to this distance.
pub const KERNEL_SPAN: f64 = 1e-10;
/// Closed-form block eigenvalues.
pub const CLOSED_FORM: f64 = 1e-12;
/// Norm recursion against its closed form (relative) and β ratios.
pub const RECURSION: f64 = 1e-12;
/// f(s) must stay strictly below this.
pub const F_THRESHOLD: f64 = 1.0 / 3.0;
/// Upper end of the s-grid for the f scan.
pub const F_GRID_MAX: f64 = 28.09;
pub const F_GRID_STEP: f64 = 1e-3;
/// Analytic f_n against the projector norm.
pub const F_BRUTE_FORCE: f64 = 1e-10;
/// Slack of every one-sided theorem inequality.
pub const ONE_SIDED: f64 = 1e-10;
/// Change of E₁ between occupation caps 5 and 6.
pub const CAP_CONVERGENCE: f64 = 1e-8;
/// Commutators that must vanish.
pub const COMMUTATOR: f64 = 1e-12;
/// Target log-log slope of the excited-energy error and its half-width.
pub const SLOPE_TARGET: f64 = 4.0;
pub const SLOPE_WIDTH: f64 = 0.3;
/// Scar residual ‖Hψ − nψ‖/‖ψ‖.
pub const SCAR_RESIDUAL: f64 = 1e-12;
/// Slack of the Yrast inequality.
pub const YRAST: f64 = 1e-8;
/// Spectra at λ and |λ| must agree to this.
pub const GAUGE: f64 = 1e-10;
