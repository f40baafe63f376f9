//! Linear stability of the homogeneous state and local bifurcation analytics:
//! dispersion relation, bifurcation ladder, branch slope and curvature, and
//! the stable-wavemode classifier.

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::eigenbasis::{enumerate_modes, moments, Domain, Mode, ModeMoments, EIGENVALUE_TIE_TOL};
use crate::grid::Grid;
use crate::linalg::{condition4, mat_vec4, max_abs, solve4, Mat4, Vec4};
use crate::model::{BranchAssumptionViolation, ModelParams};

/// Slopes at or below this magnitude are treated as zero (pitchfork).
pub const TOL_SLOPE: f64 = 1e-10;
/// Largest acceptable condition number of the moment system.
pub const MAX_CONDITION: f64 = 1e12;
/// Relative tolerance for two bifurcation values to count as tied.
pub const CHI_TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BifurcationError {
    #[error("degenerate model: f'(ubar) * phi(ubar, vbar) = {product}")]
    DegenerateModel { product: f64 },
    #[error("degenerate model: f'(ubar) = 0")]
    ZeroKineticsSlope,
    #[error("no attractive threshold: f'(ubar) * phi(ubar, vbar) = {product} is not positive")]
    NoAttractiveThreshold { product: f64 },
    #[error("branch analytics do not apply: {}", join(.0))]
    Assumptions(Vec<BranchAssumptionViolation>),
    #[error("{mode} has chi'(0) = {chi_prime:e}; the moment system needs a pitchfork branch")]
    NotPitchfork { mode: String, chi_prime: f64 },
    #[error("moment system for {mode} is ill-conditioned (condition {condition:e})")]
    IllConditioned { mode: String, condition: f64 },
}

fn join(v: &[BranchAssumptionViolation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

/// The 2x2 linearization about the homogeneous state restricted to one
/// eigenvalue of the Laplacian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Linearization {
    pub mode: Option<Mode>,
    pub lambda: f64,
    pub h: [[f64; 2]; 2],
    /// Matrix trace, always negative.
    pub tr: f64,
    pub det: f64,
    /// Roots of `sigma^2 - tr sigma + det`, real part descending.
    pub growth_rates: [Complex64; 2],
}

impl Linearization {
    /// Real part of the leading growth rate.
    pub fn dominant_rate(&self) -> f64 {
        self.growth_rates[0].re
    }

    /// u:v ratio of the eigenvector for the leading rate when that rate is
    /// real.
    pub fn dominant_ratio(&self) -> Option<f64> {
        let s = self.growth_rates[0];
        if s.im != 0.0 || self.h[1][0] == 0.0 {
            return None;
        }
        Some((s.re - self.h[1][1]) / self.h[1][0])
    }
}

/// Linearization for a nonconstant mode.
pub fn linearize(p: &ModelParams, mode: &Mode) -> Linearization {
    Linearization {
        mode: Some(*mode),
        ..linearize_at(p, mode.lambda())
    }
}

/// Linearization at an arbitrary eigenvalue `lambda >= 0` (0 is the
/// spatially constant perturbation).
pub fn linearize_at(p: &ModelParams, lambda: f64) -> Linearization {
    let phi = p.sensitivity_at_rest().value;
    let fp = p.kinetics_slope();
    let a = -p.d1() * lambda - p.mu() * p.ubar();
    let b = p.chi() * phi * lambda;
    let c = fp;
    let d = -p.d2() * lambda - p.alpha();
    let tr = a + d;
    let det = a * d - b * c;
    Linearization {
        mode: None,
        lambda,
        h: [[a, b], [c, d]],
        tr,
        det,
        growth_rates: quadratic_roots(tr, det),
    }
}

/// Roots of `s^2 - tr s + det`, ordered by real part (then imaginary part)
/// descending.
fn quadratic_roots(tr: f64, det: f64) -> [Complex64; 2] {
    let half = 0.5 * tr;
    let disc = half * half - det;
    if disc >= 0.0 {
        let sq = disc.sqrt();
        // avoid cancellation in the smaller-magnitude root
        let big = if half >= 0.0 { half + sq } else { half - sq };
        let small = if big != 0.0 { det / big } else { 0.0 };
        let (hi, lo) = if big >= small { (big, small) } else { (small, big) };
        [Complex64::new(hi, 0.0), Complex64::new(lo, 0.0)]
    } else {
        let im = (-disc).sqrt();
        [Complex64::new(half, im), Complex64::new(half, -im)]
    }
}

fn coupling(p: &ModelParams) -> f64 {
    p.kinetics_slope() * p.sensitivity_at_rest().value
}

/// Bifurcation value at eigenvalue `lambda`.
pub fn chi_bar_at(p: &ModelParams, lambda: f64) -> Result<f64, BifurcationError> {
    let product = coupling(p);
    if product == 0.0 {
        return Err(BifurcationError::DegenerateModel { product });
    }
    Ok((p.d1() * lambda + p.mu() * p.ubar()) * (p.d2() * lambda + p.alpha()) / (product * lambda))
}

/// Value of chi at which the linearization for `mode` becomes singular.
pub fn chi_bar(p: &ModelParams, mode: &Mode) -> Result<f64, BifurcationError> {
    chi_bar_at(p, mode.lambda())
}

/// u:v amplitude ratio of the kernel of the singular linearization.
pub fn q_ratio(p: &ModelParams, mode: &Mode) -> Result<f64, BifurcationError> {
    let fp = p.kinetics_slope();
    if fp == 0.0 {
        return Err(BifurcationError::ZeroKineticsSlope);
    }
    Ok((p.d2() * mode.lambda() + p.alpha()) / fp)
}

/// Continuous minimizer of the bifurcation value over lambda.
pub fn lambda_star(p: &ModelParams) -> f64 {
    (p.alpha() * p.mu() * p.ubar() / (p.d1() * p.d2())).sqrt()
}

fn first_eigenvalue(dom: &Domain) -> f64 {
    let l = dom.ly().map_or(dom.lx(), |ly| ly.max(dom.lx()));
    (std::f64::consts::PI / l).powi(2)
}

/// Eigenvalue cutoff that provably contains the discrete minimizer.
pub fn threshold_cutoff(p: &ModelParams, dom: &Domain) -> f64 {
    4.0 * lambda_star(p) + first_eigenvalue(dom)
}

/// Instability threshold and the modes attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct Threshold {
    pub chi0: f64,
    /// All modes attaining `chi0`, in enumeration order. Never empty.
    pub minimizers: Vec<Mode>,
    pub cutoff: f64,
}

impl Threshold {
    pub fn k0(&self) -> &Mode {
        &self.minimizers[0]
    }

    pub fn is_minimizer(&self, mode: &Mode) -> bool {
        self.minimizers.iter().any(|m| m.indices() == mode.indices())
    }
}

fn chi_tied(a: f64, b: f64) -> bool {
    (a - b).abs() <= CHI_TIE_TOL * a.abs().max(b.abs())
}

/// `chi0 = min_k chi_bar_k`; the homogeneous state is linearly unstable iff
/// `chi > chi0`.
pub fn chi_threshold(p: &ModelParams, dom: &Domain) -> Result<Threshold, BifurcationError> {
    let product = coupling(p);
    if !(product > 0.0) {
        return Err(BifurcationError::NoAttractiveThreshold { product });
    }
    let cutoff = threshold_cutoff(p, dom);
    let modes = enumerate_modes(*dom, cutoff);
    let mut chi0 = f64::INFINITY;
    let mut minimizers: Vec<Mode> = Vec::new();
    for mode in modes {
        let c = chi_bar(p, &mode)?;
        if chi0.is_finite() && chi_tied(c, chi0) {
            chi0 = chi0.min(c);
            minimizers.push(mode);
        } else if c < chi0 {
            chi0 = c;
            minimizers.clear();
            minimizers.push(mode);
        }
    }
    debug_assert!(!minimizers.is_empty());
    Ok(Threshold { chi0, minimizers, cutoff })
}

/// `sigma'(chibar_k)`: rate at which the critical growth rate crosses zero.
pub fn eigenvalue_drift(p: &ModelParams, mode: &Mode) -> f64 {
    let lambda = mode.lambda();
    lambda * coupling(p)
        / ((p.d1() + p.d2()) * lambda + p.mu() * p.ubar() + p.alpha())
}

fn check_assumptions(p: &ModelParams) -> Result<(), BifurcationError> {
    let v = p.validate_for_branch_analytics();
    if v.is_empty() {
        Ok(())
    } else {
        Err(BifurcationError::Assumptions(v))
    }
}

/// Branch slope `chi_k'(0)`.
pub fn chi_prime(p: &ModelParams, mode: &Mode, mom: &ModeMoments) -> Result<f64, BifurcationError> {
    check_assumptions(p)?;
    let cb = chi_bar(p, mode)?;
    let q = q_ratio(p, mode)?;
    let j = p.sensitivity_at_rest();
    let lambda = mode.lambda();
    Ok((p.mu() * q * q - 0.5 * lambda * cb * (j.du * q + j.dv)) * mom.i3 / (lambda * j.value))
}

/// Projections of the second-order branch corrections onto `Phi^2` and
/// `|grad Phi|^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSolution {
    pub m1: f64,
    pub g1: f64,
    pub m2: f64,
    pub g2: f64,
    /// 1-norm condition estimate of the 4x4 system.
    pub condition: f64,
    /// `|A x - b|_inf / (|A|_inf |x|_inf + |b|_inf)`.
    pub residual: f64,
    /// The closure `lap |grad Phi|^2 = 2 lambda^2 Phi^2 - 2 lambda |grad Phi|^2`
    /// and `int |grad Phi|^4 = lambda^2 int Phi^4` behind the system hold
    /// exactly only for modes varying along one axis.
    pub closure_exact: bool,
}

impl MomentSolution {
    pub fn as_array(&self) -> Vec4 {
        [self.m1, self.g1, self.m2, self.g2]
    }
}

/// Matrix and right-hand side of the moment system.
pub fn moment_system(
    p: &ModelParams,
    mode: &Mode,
    mom: &ModeMoments,
) -> Result<(Mat4, Vec4), BifurcationError> {
    let cb = chi_bar(p, mode)?;
    let q = q_ratio(p, mode)?;
    let j = p.sensitivity_at_rest();
    let (d1, d2, mu, ubar, alpha) = (p.d1(), p.d2(), p.mu(), p.ubar(), p.alpha());
    let fp = p.kinetics_slope();
    let l = mode.lambda();
    let phi = j.value;
    let a = [
        [-2.0 * d1 * l - mu * ubar, 2.0 * d1, 2.0 * cb * l * phi, -2.0 * cb * phi],
        [2.0 * d1 * l * l, -2.0 * d1 * l - mu * ubar, -2.0 * cb * l * l * phi, 2.0 * cb * l * phi],
        [fp, 0.0, -2.0 * d2 * l - alpha, 2.0 * d2],
        [0.0, fp, 2.0 * d2 * l * l, -2.0 * d2 * l - alpha],
    ];
    let c = j.du * q + j.dv;
    let b = [
        (mu * q * q - 2.0 / 3.0 * cb * c * l) * mom.i4,
        (2.0 / 3.0 * l * l * cb * c + 1.0 / 3.0 * l * mu * q * q) * mom.i4,
        0.0,
        0.0,
    ];
    Ok((a, b))
}

/// Solves the 4x4 moment system for a pitchfork branch.
pub fn solve_moment_system(
    p: &ModelParams,
    mode: &Mode,
    mom: &ModeMoments,
) -> Result<MomentSolution, BifurcationError> {
    let cp = chi_prime(p, mode, mom)?;
    if cp.abs() > TOL_SLOPE {
        return Err(BifurcationError::NotPitchfork {
            mode: mode.to_string(),
            chi_prime: cp,
        });
    }
    let (a, b) = moment_system(p, mode, mom)?;
    let condition = condition4(&a);
    if !(condition <= MAX_CONDITION) {
        return Err(BifurcationError::IllConditioned {
            mode: mode.to_string(),
            condition,
        });
    }
    let x = solve4(&a, &b).ok_or_else(|| BifurcationError::IllConditioned {
        mode: mode.to_string(),
        condition: f64::INFINITY,
    })?;
    let ax = mat_vec4(&a, &x);
    let r: Vec<f64> = ax.iter().zip(&b).map(|(p, q)| p - q).collect();
    let norm_a = a
        .iter()
        .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let scale = norm_a * max_abs(&x) + max_abs(&b);
    let residual = if scale > 0.0 { max_abs(&r) / scale } else { 0.0 };
    Ok(MomentSolution {
        m1: x[0],
        g1: x[1],
        m2: x[2],
        g2: x[3],
        condition,
        residual,
        closure_exact: mode.is_one_dimensional(),
    })
}

/// Branch curvature `chi_k''(0)` of a pitchfork branch.
pub fn chi_double_prime(
    p: &ModelParams,
    mode: &Mode,
    mom: &ModeMoments,
    ms: &MomentSolution,
) -> Result<f64, BifurcationError> {
    let cp = chi_prime(p, mode, mom)?;
    if cp.abs() > TOL_SLOPE {
        return Err(BifurcationError::NotPitchfork {
            mode: mode.to_string(),
            chi_prime: cp,
        });
    }
    let cb = chi_bar(p, mode)?;
    let q = q_ratio(p, mode)?;
    let j = p.sensitivity_at_rest();
    let l = mode.lambda();
    let c = j.du * q + j.dv;
    let d = j.duu * q * q + j.dvv + 2.0 * j.duv * q;
    let bracket = j.du * q * ms.g2 - j.du * ms.g1 - l / 6.0 * d * mom.i4 - l * c * ms.m2;
    let rhs = cb * bracket + 2.0 * p.mu() * q * ms.m1;
    Ok(2.0 * rhs / (j.value * l))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BranchType {
    Transcritical,
    Pitchfork,
}

impl BranchType {
    pub fn tag(self) -> &'static str {
        match self {
            BranchType::Transcritical => "transcritical",
            BranchType::Pitchfork => "pitchfork",
        }
    }
}

/// Predicted stability of the bifurcating branch near `s = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stability {
    StableForPositiveS,
    StableForNegativeS,
    /// Not the minimizing mode: unstable on both sides.
    Unstable,
    StableSupercritical,
    UnstableSubcritical,
    /// Minimizing pitchfork with vanishing or unavailable curvature.
    Indeterminate,
}

impl Stability {
    pub fn tag(self) -> &'static str {
        match self {
            Stability::StableForPositiveS => "stable_s_positive",
            Stability::StableForNegativeS => "stable_s_negative",
            Stability::Unstable => "both_unstable",
            Stability::StableSupercritical => "stable_supercritical",
            Stability::UnstableSubcritical => "unstable_subcritical",
            Stability::Indeterminate => "indeterminate",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnalyticsWarning {
    /// The eigenvalue is shared by several index tuples.
    Degenerate { multiplicity: usize },
    /// `D1 D2 lambda_i lambda_j = alpha mu ubar`: two distinct eigenvalues
    /// share one bifurcation value.
    ChiBarCollision { other: (usize, usize) },
    /// Moment closure is approximate for modes varying along both axes.
    ClosureApproximate,
    /// Several modes attain the threshold.
    TiedMinimizer { count: usize },
    /// Curvature could not be evaluated.
    CurvatureUnavailable { reason: String },
}

impl fmt::Display for AnalyticsWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnalyticsWarning::Degenerate { multiplicity } => {
                write!(f, "eigenvalue has multiplicity {multiplicity}")
            }
            AnalyticsWarning::ChiBarCollision { other } => {
                write!(f, "bifurcation value collides with mode ({}, {})", other.0, other.1)
            }
            AnalyticsWarning::ClosureApproximate => {
                f.write_str("moment closure approximate for a two-dimensional mode")
            }
            AnalyticsWarning::TiedMinimizer { count } => {
                write!(f, "threshold attained by {count} modes")
            }
            AnalyticsWarning::CurvatureUnavailable { reason } => {
                write!(f, "curvature unavailable: {reason}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BifurcationPoint {
    pub mode: Mode,
    pub chi_bar: f64,
    pub q: f64,
    pub chi_prime: f64,
    pub chi_double_prime: Option<f64>,
    pub branch_type: BranchType,
    pub stability: Stability,
    pub is_minimizer: bool,
    pub warnings: Vec<AnalyticsWarning>,
}

impl BifurcationPoint {
    pub fn degenerate_warning(&self) -> bool {
        self.warnings
            .iter()
            .any(|w| matches!(w, AnalyticsWarning::Degenerate { .. }))
    }
}

/// Classifies `mode` against a precomputed threshold.
pub fn classify_with(
    p: &ModelParams,
    threshold: &Threshold,
    mode: &Mode,
) -> Result<BifurcationPoint, BifurcationError> {
    let mom = moments(mode);
    let cb = chi_bar(p, mode)?;
    let q = q_ratio(p, mode)?;
    let cp = chi_prime(p, mode, &mom)?;
    let is_minimizer = threshold.is_minimizer(mode);
    let mut warnings = Vec::new();
    if mode.is_degenerate() {
        warnings.push(AnalyticsWarning::Degenerate {
            multiplicity: mode.multiplicity(),
        });
    }
    let target = p.alpha() * p.mu() * p.ubar();
    for other in enumerate_modes(mode.domain(), threshold.cutoff.max(mode.lambda()) * 4.0) {
        let distinct = (other.lambda() - mode.lambda()).abs()
            > EIGENVALUE_TIE_TOL * other.lambda().max(mode.lambda());
        let prod = p.d1() * p.d2() * mode.lambda() * other.lambda();
        if distinct && (prod - target).abs() <= 1e-10 * target {
            warnings.push(AnalyticsWarning::ChiBarCollision {
                other: other.indices(),
            });
        }
    }
    if is_minimizer && threshold.minimizers.len() > 1 {
        warnings.push(AnalyticsWarning::TiedMinimizer {
            count: threshold.minimizers.len(),
        });
    }

    let pitchfork = cp.abs() <= TOL_SLOPE;
    let branch_type = if pitchfork {
        BranchType::Pitchfork
    } else {
        BranchType::Transcritical
    };
    let mut curvature_value = None;
    if pitchfork {
        if !mode.is_one_dimensional() {
            warnings.push(AnalyticsWarning::ClosureApproximate);
        }
        let curvature = solve_moment_system(p, mode, &mom)
            .and_then(|ms| chi_double_prime(p, mode, &mom, &ms));
        match curvature {
            Ok(c) => curvature_value = Some(c),
            Err(e) => warnings.push(AnalyticsWarning::CurvatureUnavailable {
                reason: e.to_string(),
            }),
        }
    }

    let stability = if !is_minimizer {
        Stability::Unstable
    } else if !pitchfork {
        if cp > 0.0 {
            Stability::StableForPositiveS
        } else {
            Stability::StableForNegativeS
        }
    } else {
        match curvature_value {
            Some(c) if c > 0.0 => Stability::StableSupercritical,
            Some(c) if c < 0.0 => Stability::UnstableSubcritical,
            _ => Stability::Indeterminate,
        }
    };

    Ok(BifurcationPoint {
        mode: *mode,
        chi_bar: cb,
        q,
        chi_prime: cp,
        chi_double_prime: curvature_value,
        branch_type,
        stability,
        is_minimizer,
        warnings,
    })
}

/// Classifies the bifurcating branch at `mode` on `dom`.
pub fn classify_branch(
    p: &ModelParams,
    dom: &Domain,
    mode: &Mode,
) -> Result<BifurcationPoint, BifurcationError> {
    let threshold = chi_threshold(p, dom)?;
    classify_with(p, &threshold, mode)
}

/// Bifurcation ladder: every mode with `lambda <= lambda_max`, sorted by
/// bifurcation value ascending.
pub fn ladder(
    p: &ModelParams,
    dom: &Domain,
    lambda_max: f64,
) -> Result<(Threshold, Vec<BifurcationPoint>), BifurcationError> {
    let threshold = chi_threshold(p, dom)?;
    let mut rows = enumerate_modes(*dom, lambda_max)
        .iter()
        .map(|m| classify_with(p, &threshold, m))
        .collect::<Result<Vec<_>, _>>()?;
    rows.sort_by(|a, b| a.chi_bar.total_cmp(&b.chi_bar));
    Ok((threshold, rows))
}

/// First-order approximation `(ubar + s Q Phi, vbar + s Phi)` of the
/// bifurcating branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchSeed {
    pub mode: Mode,
    pub s: f64,
    pub q: f64,
    pub ubar: f64,
    pub vbar: f64,
}

impl BranchSeed {
    pub fn eval_u(&self, x: f64, y: f64) -> f64 {
        self.ubar + self.s * self.q * self.mode.value(x, y)
    }

    pub fn eval_v(&self, x: f64, y: f64) -> f64 {
        self.vbar + self.s * self.mode.value(x, y)
    }

    /// Samples both components at the cell centres of `grid`.
    pub fn sample(&self, grid: &Grid) -> (Vec<f64>, Vec<f64>) {
        (
            grid.sample(|x, y| self.eval_u(x, y)),
            grid.sample(|x, y| self.eval_v(x, y)),
        )
    }
}

/// Keep `|s|` at most about a tenth of `ubar` for the expansion to be useful.
pub fn branch_seed(p: &ModelParams, mode: &Mode, s: f64) -> Result<BranchSeed, BifurcationError> {
    let (ubar, vbar) = p.homogeneous_state();
    Ok(BranchSeed {
        mode: *mode,
        s,
        q: q_ratio(p, mode)?,
        ubar,
        vbar,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigenbasis::{project, sample_mode};
    use crate::model::{Kinetics, Sensitivity};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn unit_interval() -> Domain {
        Domain::interval(PI).unwrap()
    }

    fn mode1(k: usize) -> Mode {
        Mode::new(unit_interval(), k, 0).unwrap()
    }

    #[test]
    fn marginal_linearization() {
        let lin = linearize(&ModelParams::unit(4.0), &mode1(1));
        assert_eq!(lin.h, [[-2.0, 4.0], [1.0, -2.0]]);
        assert_eq!(lin.growth_rates[0], Complex64::new(0.0, 0.0));
        assert_relative_eq!(lin.growth_rates[1].re, -4.0);
    }

    #[test]
    fn unstable_linearization() {
        let lin = linearize(&ModelParams::unit(5.0), &mode1(1));
        assert_relative_eq!(lin.growth_rates[0].re, -2.0 + 5f64.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(lin.growth_rates[1].re, -2.0 - 5f64.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(lin.dominant_ratio().unwrap(), 5f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn zero_mode_decouples() {
        let p = ModelParams::new(1.0, 1.0, 3.0, 2.0, 1.5, 0.5, Sensitivity::Linear, Kinetics::Linear).unwrap();
        let lin = linearize_at(&p, 0.0);
        assert_eq!(lin.h[0][1], 0.0);
        assert_relative_eq!(lin.growth_rates[0].re, -0.5);
        assert_relative_eq!(lin.growth_rates[1].re, -3.0);
    }

    #[test]
    fn complex_rates_for_repulsion() {
        let lin = linearize(&ModelParams::unit(-20.0), &mode1(1));
        assert!(lin.growth_rates[0].im > 0.0);
        assert_relative_eq!(lin.growth_rates[0].re, -2.0);
        assert!(lin.dominant_ratio().is_none());
    }

    #[test]
    fn ladder_values() {
        let p = ModelParams::unit(1.0);
        assert_eq!(chi_bar(&p, &mode1(1)).unwrap(), 4.0);
        assert_eq!(chi_bar(&p, &mode1(2)).unwrap(), 6.25);
        assert_eq!(q_ratio(&p, &mode1(1)).unwrap(), 2.0);
        let t = chi_threshold(&p, &unit_interval()).unwrap();
        assert_eq!(t.chi0, 4.0);
        assert_eq!(t.minimizers.len(), 1);
        assert_eq!(t.k0().m(), 1);
    }

    #[test]
    fn q_example() {
        let p = ModelParams::new(1.0, 0.1, 1.0, 1.0, 1.0, 1.0, Sensitivity::Linear, Kinetics::Linear).unwrap();
        let m = Mode::new(Domain::square(1.0).unwrap(), 1, 1).unwrap();
        assert_relative_eq!(q_ratio(&p, &m).unwrap(), 0.2 * PI * PI + 1.0, epsilon = 1e-14);
    }

    #[test]
    fn degenerate_coupling_is_an_error() {
        let p = ModelParams::new(1.0, 1.0, 1.0, 1.0, 1.0, 1.0, Sensitivity::VolumeFilling, Kinetics::Linear)
            .unwrap();
        assert!(matches!(chi_bar(&p, &mode1(1)), Err(BifurcationError::DegenerateModel { .. })));
        assert!(chi_threshold(&p, &unit_interval()).is_err());
    }

    #[test]
    fn growing_d2_pushes_threshold_up() {
        let mut last = 0.0;
        for d2 in [1.0, 10.0, 100.0, 1e4] {
            let p = ModelParams::unit(1.0).with_d2(d2).unwrap();
            let c = chi_threshold(&p, &unit_interval()).unwrap().chi0;
            assert!(c > last);
            last = c;
        }
        assert!(last > 1e3);
    }

    #[test]
    fn drift_example_and_central_difference() {
        let p = ModelParams::unit(4.0);
        let m = mode1(1);
        assert_relative_eq!(eigenvalue_drift(&p, &m), 0.25);
        for (d2, mu, k) in [(1.0, 1.0, 1), (0.1, 3.0, 2), (2.0, 0.5, 3)] {
            let p = ModelParams::unit(1.0).with_d2(d2).unwrap().with_mu(mu).unwrap();
            let m = mode1(k);
            let cb = chi_bar(&p, &m).unwrap();
            let h = 1e-5;
            let plus = linearize(&p.with_chi(cb + h).unwrap(), &m).dominant_rate();
            let minus = linearize(&p.with_chi(cb - h).unwrap(), &m).dominant_rate();
            let fd = (plus - minus) / (2.0 * h);
            assert!((fd - eigenvalue_drift(&p, &m)).abs() < 1e-8, "{fd}");
        }
    }

    #[test]
    fn rectangle_modes_are_pitchforks() {
        let p = ModelParams::unit(1.0);
        let d = Domain::rectangle(1.0, 2.0).unwrap();
        for m in enumerate_modes(d, 200.0) {
            assert_eq!(chi_prime(&p, &m, &moments(&m)).unwrap(), 0.0);
        }
    }

    #[test]
    fn constant_sensitivity_slope_collapses() {
        let p = ModelParams::new(1.0, 1.0, 1.0, 2.0, 1.0, 1.0, Sensitivity::Constant, Kinetics::Linear).unwrap();
        let m = mode1(1);
        let mom = ModeMoments { i3: 0.7, i4: 1.0, i_grad: 0.35 };
        let q = q_ratio(&p, &m).unwrap();
        assert_relative_eq!(chi_prime(&p, &m, &mom).unwrap(), 2.0 * q * q * 0.7 / m.lambda());
    }

    #[test]
    fn moment_system_linear_in_i4() {
        let p = ModelParams::unit(1.0);
        let m = mode1(1);
        let mom = moments(&m);
        let a = solve_moment_system(&p, &m, &mom).unwrap();
        let b = solve_moment_system(&p, &m, &mom.scaled_i4(3.0)).unwrap();
        for (x, y) in a.as_array().iter().zip(b.as_array()) {
            assert_relative_eq!(3.0 * x, y, max_relative = 1e-12);
        }
        let z = solve_moment_system(&p, &m, &mom.scaled_i4(0.0)).unwrap();
        assert_eq!(z.as_array(), [0.0; 4]);
        assert!(a.residual <= 1e-10);
        assert!(a.closure_exact);
    }

    #[test]
    fn moment_system_rejects_transcritical() {
        let p = ModelParams::unit(1.0).with_mu(2.0).unwrap();
        let mom = ModeMoments { i3: 1.0, i4: 1.0, i_grad: 0.5 };
        assert!(matches!(
            solve_moment_system(&p, &mode1(1), &mom),
            Err(BifurcationError::NotPitchfork { .. })
        ));
    }

    #[test]
    fn curvature_collapses_without_sensitivity_derivatives() {
        let base = ModelParams::new(1.3, 0.7, 1.0, 2.0, 1.5, 0.8, Sensitivity::Constant, Kinetics::Linear).unwrap();
        let m = mode1(1);
        let mom = moments(&m);
        let ms = solve_moment_system(&base, &m, &mom).unwrap();
        let q = q_ratio(&base, &m).unwrap();
        let want = 4.0 * base.mu() * q * ms.m1 / m.lambda();
        assert_relative_eq!(chi_double_prime(&base, &m, &mom, &ms).unwrap(), want, max_relative = 1e-12);

        // the curvature vanishes linearly with mu
        let at = |mu: f64| {
            let p = base.with_mu(mu).unwrap();
            let ms = solve_moment_system(&p, &m, &mom).unwrap();
            chi_double_prime(&p, &m, &mom, &ms).unwrap()
        };
        let (a, b) = (at(1e-6), at(1e-7));
        assert!(a.abs() < 1e-4);
        assert_relative_eq!(a / b, 10.0, max_relative = 1e-4);
    }

    #[test]
    fn unit_interval_classification() {
        let p = ModelParams::unit(1.0);
        let d = unit_interval();
        let k1 = classify_branch(&p, &d, &mode1(1)).unwrap();
        assert!(k1.is_minimizer);
        assert_eq!(k1.branch_type, BranchType::Pitchfork);
        assert_eq!(k1.stability, Stability::StableSupercritical);
        assert!(k1.chi_double_prime.unwrap() > 0.0);
        let k2 = classify_branch(&p, &d, &mode1(2)).unwrap();
        assert_eq!(k2.stability, Stability::Unstable);
        assert!(!k2.is_minimizer);
    }

    #[test]
    fn square_flags_degeneracy_and_ties() {
        let p = ModelParams::unit(1.0);
        let d = Domain::square(PI).unwrap();
        let (t, rows) = ladder(&p, &d, 10.0).unwrap();
        assert_eq!(t.minimizers.len(), 2);
        let first = &rows[0];
        assert!(first.is_minimizer && first.degenerate_warning());
        assert!(first
            .warnings
            .iter()
            .any(|w| matches!(w, AnalyticsWarning::TiedMinimizer { count: 2 })));
        let diag = rows.iter().find(|r| r.mode.indices() == (1, 1)).unwrap();
        assert!(diag.warnings.contains(&AnalyticsWarning::ClosureApproximate));
        for w in rows.windows(2) {
            assert!(w[0].chi_bar <= w[1].chi_bar);
        }
    }

    #[test]
    fn collision_warning() {
        // D1 D2 lambda_1 lambda_2 = alpha mu ubar with lambda = 1, 4
        let p = ModelParams::new(1.0, 1.0, 1.0, 4.0, 1.0, 1.0, Sensitivity::Linear, Kinetics::Linear).unwrap();
        let pt = classify_branch(&p, &unit_interval(), &mode1(1)).unwrap();
        assert!(pt
            .warnings
            .contains(&AnalyticsWarning::ChiBarCollision { other: (2, 0) }));
        assert_relative_eq!(chi_bar(&p, &mode1(1)).unwrap(), chi_bar(&p, &mode1(2)).unwrap());
        // the second-order system is singular here too
        assert_eq!(pt.stability, Stability::Indeterminate);
        assert!(pt
            .warnings
            .iter()
            .any(|w| matches!(w, AnalyticsWarning::CurvatureUnavailable { .. })));
    }

    #[test]
    fn seed_values() {
        let p = ModelParams::unit(4.0);
        let m = mode1(1);
        let zero = branch_seed(&p, &m, 0.0).unwrap();
        assert_eq!((zero.eval_u(0.3, 0.0), zero.eval_v(1.1, 0.0)), (1.0, 1.0));
        let seed = branch_seed(&p, &m, 0.01).unwrap();
        let g = Grid::uniform(unit_interval(), 64).unwrap();
        let (u, _) = seed.sample(&g);
        let du: Vec<f64> = u.iter().map(|x| x - 1.0).collect();
        assert_relative_eq!(project(&du, &g, &m).unwrap(), 0.02, epsilon = 1e-14);
        let phi = sample_mode(&g, &m).unwrap();
        assert_relative_eq!(u[5], 1.0 + 0.02 * phi[5], epsilon = 1e-15);
    }

    fn params_strategy() -> impl Strategy<Value = ModelParams> {
        (0.01f64..5.0, 0.01f64..5.0, -30.0f64..30.0, 0.1f64..10.0, 0.1f64..5.0, 0.1f64..5.0, 0.1f64..3.0)
            .prop_map(|(d1, d2, chi, mu, ubar, alpha, beta)| {
                ModelParams::new(d1, d2, chi, mu, ubar, alpha, Sensitivity::Linear, Kinetics::affine_linear(beta).unwrap())
                    .unwrap()
            })
    }

    proptest! {
        #[test]
        fn vieta_and_null_vector(p in params_strategy(), k in 1usize..8, l in 0.5f64..5.0) {
            let m = Mode::new(Domain::interval(l).unwrap(), k, 0).unwrap();
            let lin = linearize(&p, &m);
            let [s1, s2] = lin.growth_rates;
            let scale = lin.tr.abs().max(1.0);
            prop_assert!(((s1 + s2).re - lin.tr).abs() <= 1e-12 * scale);
            prop_assert!((s1 + s2).im.abs() <= 1e-12 * scale);
            let dscale = lin.det.abs().max(lin.h[0][0].abs() * lin.h[1][1].abs()).max(1.0);
            prop_assert!(((s1 * s2).re - lin.det).abs() <= 1e-12 * dscale);
            prop_assert!(lin.tr < 0.0);
            prop_assert!(s1.re >= s2.re);

            let cb = chi_bar(&p, &m).unwrap();
            let q = q_ratio(&p, &m).unwrap();
            prop_assert!(cb > 0.0 && q > 0.0);
            let h = linearize(&p.with_chi(cb).unwrap(), &m).h;
            let r0 = h[0][0] * q + h[0][1];
            let r1 = h[1][0] * q + h[1][1];
            prop_assert!(r0.abs() <= 1e-12 * h[0][0].abs().max(h[0][1].abs()) * q.max(1.0));
            prop_assert!(r1.abs() <= 1e-12 * h[1][1].abs().max(1.0));
            prop_assert!(eigenvalue_drift(&p, &m) > 0.0);
        }

        #[test]
        fn instability_iff_above_bifurcation_value(p in params_strategy(), k in 1usize..6) {
            let m = Mode::new(Domain::interval(2.0).unwrap(), k, 0).unwrap();
            let cb = chi_bar(&p, &m).unwrap();
            prop_assume!((p.chi() - cb).abs() > 1e-9 * cb);
            let lin = linearize(&p, &m);
            prop_assert_eq!(lin.det < 0.0, p.chi() > cb);
            prop_assert_eq!(lin.dominant_rate() > 0.0, p.chi() > cb);
        }

        #[test]
        fn threshold_is_bracketing_minimizer(p in params_strategy(), lx in 0.3f64..6.0, ly in 0.3f64..6.0) {
            let d = Domain::rectangle(lx, ly).unwrap();
            let t = chi_threshold(&p, &d).unwrap();
            // brute force over a far larger spectrum
            let brute = enumerate_modes(d, 40.0 * t.cutoff)
                .iter()
                .map(|m| chi_bar(&p, m).unwrap())
                .fold(f64::INFINITY, f64::min);
            prop_assert!((brute - t.chi0).abs() <= 1e-12 * t.chi0);
            // below the threshold every mode decays
            let below = p.with_chi(0.999 * t.chi0).unwrap();
            for m in enumerate_modes(d, 4.0 * t.cutoff) {
                prop_assert!(linearize(&below, &m).dominant_rate() < 0.0);
            }
        }
    }
}
