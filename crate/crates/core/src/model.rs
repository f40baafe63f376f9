//! Model constants, sensitivity and kinetics families, and the homogeneous
//! steady state of the logistic Keller-Segel system
//!
//! ```text
//! u_t = div(D1 grad u - chi phi(u, v) grad v) + mu u (ubar - u)
//! v_t = D2 lap v - alpha v + f(u)
//! ```
//!
//! with zero-flux boundaries.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("{name} must be positive (got {value})")]
    NonPositive { name: &'static str, value: f64 },
    #[error("{name} must be finite (got {value})")]
    NonFinite { name: &'static str, value: f64 },
    #[error("unknown {family} family `{tag}`")]
    UnknownFamily { family: &'static str, tag: String },
}

/// Chemotactic sensitivity phi(u, v).
///
/// Derivatives are exact closed forms. `VolumeFilling` is only positive for
/// `0 < u < 1`; parameters with `ubar >= 1` are accepted but then
/// phi(ubar, vbar) <= 0 and the bifurcation analytics will report it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sensitivity {
    /// phi = u
    Linear,
    /// phi = u (1 - u)
    VolumeFilling,
    /// phi = 1
    Constant,
}

/// Value and partial derivatives of phi at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivityJet {
    pub value: f64,
    pub du: f64,
    pub dv: f64,
    pub duu: f64,
    pub duv: f64,
    pub dvv: f64,
}

impl Sensitivity {
    pub const ALL: [Sensitivity; 3] = [
        Sensitivity::Linear,
        Sensitivity::VolumeFilling,
        Sensitivity::Constant,
    ];

    #[inline]
    pub fn eval(self, u: f64, _v: f64) -> f64 {
        match self {
            Sensitivity::Linear => u,
            Sensitivity::VolumeFilling => u * (1.0 - u),
            Sensitivity::Constant => 1.0,
        }
    }

    /// d phi / du
    #[inline]
    pub fn du(self, u: f64, _v: f64) -> f64 {
        match self {
            Sensitivity::Linear => 1.0,
            Sensitivity::VolumeFilling => 1.0 - 2.0 * u,
            Sensitivity::Constant => 0.0,
        }
    }

    pub fn jet(self, u: f64, v: f64) -> SensitivityJet {
        let duu = match self {
            Sensitivity::VolumeFilling => -2.0,
            Sensitivity::Linear | Sensitivity::Constant => 0.0,
        };
        SensitivityJet {
            value: self.eval(u, v),
            du: self.du(u, v),
            dv: 0.0,
            duu,
            duv: 0.0,
            dvv: 0.0,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Sensitivity::Linear => "linear",
            Sensitivity::VolumeFilling => "volume_filling",
            Sensitivity::Constant => "constant",
        }
    }

    pub fn from_tag(tag: &str) -> Result<Self, ModelError> {
        Self::ALL
            .into_iter()
            .find(|s| s.tag() == tag)
            .ok_or_else(|| ModelError::UnknownFamily {
                family: "sensitivity",
                tag: tag.to_string(),
            })
    }
}

impl fmt::Display for Sensitivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Chemical production rate f(u).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kinetics {
    /// f = u
    Linear,
    /// f = beta u, beta > 0
    AffineLinear { beta: f64 },
}

impl Kinetics {
    pub fn affine_linear(beta: f64) -> Result<Self, ModelError> {
        check_positive("beta", beta)?;
        Ok(Kinetics::AffineLinear { beta })
    }

    #[inline]
    pub fn eval(self, u: f64) -> f64 {
        self.slope() * u
    }

    /// f'(u); constant for both families.
    #[inline]
    pub fn derivative(self, _u: f64) -> f64 {
        self.slope()
    }

    pub fn second_derivative(self, _u: f64) -> f64 {
        0.0
    }

    #[inline]
    fn slope(self) -> f64 {
        match self {
            Kinetics::Linear => 1.0,
            Kinetics::AffineLinear { beta } => beta,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Kinetics::Linear => "linear",
            Kinetics::AffineLinear { .. } => "affine_linear",
        }
    }
}

/// An assumption of the second-order branch analytics that does not hold.
#[derive(Debug, Clone, PartialEq)]
pub enum BranchAssumptionViolation {
    /// f''(ubar) != 0; the s^2 balance of the chemical equation ignores it.
    SecondOrderKinetics { f_second: f64 },
    /// The sensitivity is not twice differentiable at the homogeneous state.
    NonSmoothSensitivity,
}

impl fmt::Display for BranchAssumptionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BranchAssumptionViolation::SecondOrderKinetics { f_second } => write!(
                f,
                "second-order kinetics term unmodeled (f''(ubar) = {f_second})"
            ),
            BranchAssumptionViolation::NonSmoothSensitivity => {
                f.write_str("sensitivity is not C2 at the homogeneous state")
            }
        }
    }
}

/// Validated model constants.
///
/// All fields are private so that a value of this type always satisfies
/// `d1, d2, mu, ubar, alpha > 0` and `chi` finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    d1: f64,
    d2: f64,
    chi: f64,
    mu: f64,
    ubar: f64,
    alpha: f64,
    phi: Sensitivity,
    f: Kinetics,
}

fn check_positive(name: &'static str, value: f64) -> Result<(), ModelError> {
    if !value.is_finite() {
        return Err(ModelError::NonFinite { name, value });
    }
    if value <= 0.0 {
        return Err(ModelError::NonPositive { name, value });
    }
    Ok(())
}

impl ModelParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        d1: f64,
        d2: f64,
        chi: f64,
        mu: f64,
        ubar: f64,
        alpha: f64,
        phi: Sensitivity,
        f: Kinetics,
    ) -> Result<Self, ModelError> {
        check_positive("d1", d1)?;
        check_positive("d2", d2)?;
        check_positive("mu", mu)?;
        check_positive("ubar", ubar)?;
        check_positive("alpha", alpha)?;
        if !chi.is_finite() {
            return Err(ModelError::NonFinite { name: "chi", value: chi });
        }
        if let Kinetics::AffineLinear { beta } = f {
            check_positive("beta", beta)?;
        }
        Ok(ModelParams {
            d1,
            d2,
            chi,
            mu,
            ubar,
            alpha,
            phi,
            f,
        })
    }

    /// D1 = D2 = mu = ubar = alpha = 1, phi = u, f = u.
    pub fn unit(chi: f64) -> Self {
        Self::new(1.0, 1.0, chi, 1.0, 1.0, 1.0, Sensitivity::Linear, Kinetics::Linear)
            .expect("unit parameters are valid")
    }

    pub fn d1(&self) -> f64 {
        self.d1
    }
    pub fn d2(&self) -> f64 {
        self.d2
    }
    pub fn chi(&self) -> f64 {
        self.chi
    }
    pub fn mu(&self) -> f64 {
        self.mu
    }
    pub fn ubar(&self) -> f64 {
        self.ubar
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn sensitivity(&self) -> Sensitivity {
        self.phi
    }
    pub fn kinetics(&self) -> Kinetics {
        self.f
    }

    pub fn with_chi(self, chi: f64) -> Result<Self, ModelError> {
        Self::new(self.d1, self.d2, chi, self.mu, self.ubar, self.alpha, self.phi, self.f)
    }
    pub fn with_d1(self, d1: f64) -> Result<Self, ModelError> {
        Self::new(d1, self.d2, self.chi, self.mu, self.ubar, self.alpha, self.phi, self.f)
    }
    pub fn with_d2(self, d2: f64) -> Result<Self, ModelError> {
        Self::new(self.d1, d2, self.chi, self.mu, self.ubar, self.alpha, self.phi, self.f)
    }
    pub fn with_mu(self, mu: f64) -> Result<Self, ModelError> {
        Self::new(self.d1, self.d2, self.chi, mu, self.ubar, self.alpha, self.phi, self.f)
    }

    /// The unique positive constant solution (ubar, f(ubar) / alpha).
    pub fn homogeneous_state(&self) -> (f64, f64) {
        (self.ubar, self.f.eval(self.ubar) / self.alpha)
    }

    /// phi and its partials at the homogeneous state.
    pub fn sensitivity_at_rest(&self) -> SensitivityJet {
        let (u, v) = self.homogeneous_state();
        self.phi.jet(u, v)
    }

    /// f'(ubar)
    pub fn kinetics_slope(&self) -> f64 {
        self.f.derivative(self.ubar)
    }

    /// Lists every assumption of the second-order branch analytics that the
    /// parameters violate. Empty means the analytics apply.
    pub fn validate_for_branch_analytics(&self) -> Vec<BranchAssumptionViolation> {
        // Every provided sensitivity family is a polynomial, hence C2.
        branch_violations(self.f.second_derivative(self.ubar), true)
    }
}

fn branch_violations(f_second: f64, phi_is_c2: bool) -> Vec<BranchAssumptionViolation> {
    let mut out = Vec::new();
    if f_second != 0.0 {
        out.push(BranchAssumptionViolation::SecondOrderKinetics { f_second });
    }
    if !phi_is_c2 {
        out.push(BranchAssumptionViolation::NonSmoothSensitivity);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(ubar: f64, alpha: f64, f: Kinetics) -> ModelParams {
        ModelParams::new(1.0, 1.0, 1.0, 1.0, ubar, alpha, Sensitivity::Linear, f).unwrap()
    }

    #[test]
    fn homogeneous_state_examples() {
        assert_eq!(params(3.0, 1.0, Kinetics::Linear).homogeneous_state(), (3.0, 3.0));
        assert_eq!(params(1.0, 1.0, Kinetics::Linear).homogeneous_state(), (1.0, 1.0));
        let p = params(2.0, 4.0, Kinetics::affine_linear(3.0).unwrap());
        assert_eq!(p.homogeneous_state(), (2.0, 1.5));
    }

    #[test]
    fn homogeneous_state_zeroes_kinetics() {
        for (ubar, alpha, beta) in [(3.0, 1.0, 1.0), (0.7, 2.5, 0.3), (12.0, 0.01, 5.0)] {
            let p = params(ubar, alpha, Kinetics::affine_linear(beta).unwrap());
            let (u, v) = p.homogeneous_state();
            assert_eq!(p.mu() * u * (p.ubar() - u), 0.0);
            let r = -p.alpha() * v + p.kinetics().eval(u);
            assert!(r.abs() <= 1e-14 * v.abs().max(1.0), "residual {r}");
        }
    }

    #[test]
    fn linear_sensitivity_partials() {
        let p = params(2.5, 1.0, Kinetics::Linear);
        let j = p.sensitivity_at_rest();
        assert_eq!(j.value, 2.5);
        assert_eq!((j.du, j.dv, j.duu, j.duv, j.dvv), (1.0, 0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn volume_filling_partials() {
        for u in [0.1, 0.25, 0.5, 0.9] {
            let j = Sensitivity::VolumeFilling.jet(u, 0.3);
            assert_eq!(j.value, u * (1.0 - u));
            assert_eq!(j.du, 1.0 - 2.0 * u);
            assert_eq!(j.duu, -2.0);
        }
    }

    #[test]
    fn rejects_nonpositive_constants() {
        let err = ModelParams::new(-1.0, 1.0, 1.0, 1.0, 1.0, 1.0, Sensitivity::Linear, Kinetics::Linear)
            .unwrap_err();
        assert_eq!(err.to_string(), "d1 must be positive (got -1)");
        assert!(ModelParams::unit(1.0).with_d2(0.0).is_err());
        assert!(ModelParams::unit(1.0).with_chi(f64::NAN).is_err());
        assert!(Kinetics::affine_linear(0.0).is_err());
        // chi may take either sign
        assert!(ModelParams::unit(-5.0).with_chi(-5.0).is_ok());
    }

    #[test]
    fn branch_analytics_validation() {
        assert!(params(1.0, 1.0, Kinetics::Linear).validate_for_branch_analytics().is_empty());
        let p = params(1.0, 1.0, Kinetics::affine_linear(2.0).unwrap());
        assert!(p.validate_for_branch_analytics().is_empty());

        let v = branch_violations(0.5, true);
        assert_eq!(v.len(), 1);
        assert!(v[0].to_string().starts_with("second-order kinetics term unmodeled"));
        assert_eq!(branch_violations(0.5, false).len(), 2);
    }

    #[test]
    fn family_tags_round_trip() {
        for s in Sensitivity::ALL {
            assert_eq!(Sensitivity::from_tag(s.tag()).unwrap(), s);
        }
        assert!(Sensitivity::from_tag("quadratic").is_err());
    }
}
