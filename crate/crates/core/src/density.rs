//! Energy densities `G`, their derivatives up to third order, and the
//! scaling factor `g = G - G'·c` that multiplies the mean curvature in the
//! normal velocity law.
//!
//! All derivatives are closed-form. Tabulated densities supply every order
//! themselves; nothing in this module differentiates numerically.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Lower end of the admissible concentration range for power laws that are
/// singular (or non-real) at zero.
pub const POWER_LAW_DOMAIN_FLOOR: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DensityError {
    #[error("power-law exponent s = 1 is not admissible (G would be singular)")]
    InvalidExponent,
    #[error("invalid density parameter: {0}")]
    InvalidParameter(String),
    #[error("concentration {c} lies outside the admissible range ({lo}, {hi})")]
    Domain { c: f64, lo: f64, hi: f64 },
    #[error("derivative order {0} is not available")]
    Order(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Open interval of admissible concentrations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidRange {
    pub lo: f64,
    pub hi: f64,
}

impl ValidRange {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub const fn unbounded() -> Self {
        Self {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    pub fn contains(&self, c: f64) -> bool {
        c > self.lo && c < self.hi
    }
}

/// User-supplied density: `eval(c, k)` must return the k-th derivative of
/// `G` at `c` for `k ∈ {0, 1, 2, 3}`.
pub type DensityFn = dyn Fn(f64, usize) -> f64 + Send + Sync;

#[derive(Clone)]
pub enum DensityKind {
    /// `G(c) = c^s / (1 - s) + alpha·c`, for which `g(c) = c^s`.
    PowerLaw { s: f64, alpha: f64 },
    Constant { value: f64 },
    Tabulated { label: String, eval: Arc<DensityFn> },
}

impl fmt::Debug for DensityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DensityKind::PowerLaw { s, alpha } => f
                .debug_struct("PowerLaw")
                .field("s", s)
                .field("alpha", alpha)
                .finish(),
            DensityKind::Constant { value } => {
                f.debug_struct("Constant").field("value", value).finish()
            }
            DensityKind::Tabulated { label, .. } => {
                f.debug_struct("Tabulated").field("label", label).finish()
            }
        }
    }
}

/// An energy density together with its admissible concentration range.
///
/// Immutable after construction and cheap to clone.
#[derive(Debug, Clone)]
pub struct EnergyDensity {
    kind: DensityKind,
    valid_range: ValidRange,
}

/// Sampled check of the parabolicity conditions `g > 0` and `G'' > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParabolicityReport {
    pub g_positive: bool,
    pub second_derivative_positive: bool,
    pub min_g: f64,
    pub min_second_derivative: f64,
    pub sampled_range: (f64, f64),
    pub samples: usize,
}

impl ParabolicityReport {
    pub fn holds(&self) -> bool {
        self.g_positive && self.second_derivative_positive
    }
}

impl EnergyDensity {
    /// `G(c) = c^s/(1-s) + alpha·c`.
    pub fn power_law(s: f64, alpha: f64) -> Result<Self, DensityError> {
        if !s.is_finite() || !alpha.is_finite() {
            return Err(DensityError::InvalidParameter(
                "power-law parameters must be finite".into(),
            ));
        }
        if s == 1.0 {
            return Err(DensityError::InvalidExponent);
        }
        if alpha < 0.0 {
            return Err(DensityError::InvalidParameter(format!(
                "alpha must be non-negative, got {alpha}"
            )));
        }
        // Integer exponents >= 0 are polynomials and defined everywhere.
        let valid_range = if s >= 0.0 && s.fract() == 0.0 {
            ValidRange::unbounded()
        } else {
            ValidRange::new(POWER_LAW_DOMAIN_FLOOR, f64::INFINITY)
        };
        Ok(Self {
            kind: DensityKind::PowerLaw { s, alpha },
            valid_range,
        })
    }

    pub fn constant(value: f64) -> Self {
        Self {
            kind: DensityKind::Constant { value },
            valid_range: ValidRange::unbounded(),
        }
    }

    pub fn tabulated(
        label: impl Into<String>,
        valid_range: ValidRange,
        eval: impl Fn(f64, usize) -> f64 + Send + Sync + 'static,
    ) -> Result<Self, DensityError> {
        if !(valid_range.lo < valid_range.hi) {
            return Err(DensityError::InvalidArgument(
                "tabulated density needs a non-empty valid range".into(),
            ));
        }
        Ok(Self {
            kind: DensityKind::Tabulated {
                label: label.into(),
                eval: Arc::new(eval),
            },
            valid_range,
        })
    }

    pub fn kind(&self) -> &DensityKind {
        &self.kind
    }

    pub fn valid_range(&self) -> ValidRange {
        self.valid_range
    }

    fn check_domain(&self, c: f64) -> Result<(), DensityError> {
        if self.valid_range.contains(c) {
            Ok(())
        } else {
            Err(DensityError::Domain {
                c,
                lo: self.valid_range.lo,
                hi: self.valid_range.hi,
            })
        }
    }

    /// k-th derivative of `G` at `c`, `k ∈ {0,1,2,3}`.
    pub fn evaluate(&self, c: f64, order: usize) -> Result<f64, DensityError> {
        if order > 3 {
            return Err(DensityError::Order(order));
        }
        self.check_domain(c)?;
        Ok(self.eval_unchecked(c, order))
    }

    /// Like [`evaluate`](Self::evaluate) without the domain check. The flow
    /// solvers validate the concentration field once per step and then call
    /// this in their inner loops.
    pub(crate) fn eval_unchecked(&self, c: f64, order: usize) -> f64 {
        match &self.kind {
            DensityKind::PowerLaw { s, alpha } => {
                let s = *s;
                match order {
                    0 => c.powf(s) / (1.0 - s) + alpha * c,
                    1 => s / (1.0 - s) * c.powf(s - 1.0) + alpha,
                    2 => -s * c.powf(s - 2.0),
                    3 => -s * (s - 2.0) * c.powf(s - 3.0),
                    _ => f64::NAN,
                }
            }
            DensityKind::Constant { value } => {
                if order == 0 {
                    *value
                } else {
                    0.0
                }
            }
            DensityKind::Tabulated { eval, .. } => eval(c, order),
        }
    }

    /// `g(c) = G(c) - G'(c)·c` (order 0) or `g'(c) = -G''(c)·c` (order 1).
    pub fn scaling_factor(&self, c: f64, order: usize) -> Result<f64, DensityError> {
        if order > 1 {
            return Err(DensityError::Order(order));
        }
        self.check_domain(c)?;
        Ok(self.g_unchecked(c, order))
    }

    pub(crate) fn g_unchecked(&self, c: f64, order: usize) -> f64 {
        match (&self.kind, order) {
            // Exact simplification; avoids cancellation for large alpha·c.
            (DensityKind::PowerLaw { s, .. }, 0) => c.powf(*s),
            (DensityKind::PowerLaw { s, .. }, _) => s * c.powf(s - 1.0),
            (_, 0) => self.eval_unchecked(c, 0) - self.eval_unchecked(c, 1) * c,
            (_, _) => -self.eval_unchecked(c, 2) * c,
        }
    }

    /// Samples `g` and `G''` at `n` uniformly spaced points of `[lo, hi]`.
    pub fn check_parabolicity(
        &self,
        lo: f64,
        hi: f64,
        n: usize,
    ) -> Result<ParabolicityReport, DensityError> {
        if n < 2 {
            return Err(DensityError::InvalidArgument(format!(
                "need at least 2 samples, got {n}"
            )));
        }
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(DensityError::InvalidArgument(format!(
                "empty sampling range [{lo}, {hi}]"
            )));
        }
        let mut min_g = f64::INFINITY;
        let mut min_g2 = f64::INFINITY;
        for i in 0..n {
            let c = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            min_g = min_g.min(self.scaling_factor(c, 0)?);
            min_g2 = min_g2.min(self.evaluate(c, 2)?);
        }
        Ok(ParabolicityReport {
            g_positive: min_g > 0.0,
            second_derivative_positive: min_g2 > 0.0,
            min_g,
            min_second_derivative: min_g2,
            sampled_range: (lo, hi),
            samples: n,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn power_law_reference_values() {
        let d = EnergyDensity::power_law(-2.0, 1.0).unwrap();
        assert!((d.scaling_factor(1.0, 0).unwrap() - 1.0).abs() < 1e-15);
        assert!((d.evaluate(1.0, 0).unwrap() - 4.0 / 3.0).abs() < 1e-15);
        assert!((d.evaluate(1.0, 2).unwrap() - 2.0).abs() < 1e-15);
        assert!((d.scaling_factor(1.0, 1).unwrap() + 2.0).abs() < 1e-15);
    }

    #[test]
    fn power_law_first_derivative_matches_central_difference() {
        let d = EnergyDensity::power_law(-2.0, 1.0).unwrap();
        let h = 1e-5;
        let fd = (d.evaluate(2.0 + h, 0).unwrap() - d.evaluate(2.0 - h, 0).unwrap()) / (2.0 * h);
        // frozen: 11/12 from the finite-difference oracle above
        assert!((fd - 11.0 / 12.0).abs() < 1e-8);
        assert!((d.evaluate(2.0, 1).unwrap() - 11.0 / 12.0).abs() < 1e-14);
    }

    #[test]
    fn constant_density() {
        let d = EnergyDensity::constant(1.0);
        assert_eq!(d.evaluate(5.0, 0).unwrap(), 1.0);
        assert_eq!(d.evaluate(5.0, 1).unwrap(), 0.0);
        assert_eq!(d.scaling_factor(123.0, 0).unwrap(), 1.0);
    }

    #[test]
    fn exponent_one_is_rejected() {
        assert_eq!(
            EnergyDensity::power_law(1.0, 0.0).unwrap_err(),
            DensityError::InvalidExponent
        );
        assert!(EnergyDensity::power_law(-1.0, -0.5).is_err());
    }

    #[test]
    fn domain_errors() {
        let d = EnergyDensity::power_law(-2.0, 1.0).unwrap();
        assert!(matches!(d.evaluate(0.0, 0), Err(DensityError::Domain { .. })));
        assert!(matches!(d.evaluate(-1.0, 1), Err(DensityError::Domain { .. })));
        assert!(matches!(d.evaluate(1.0, 4), Err(DensityError::Order(4))));
        let quad = EnergyDensity::power_law(2.0, 0.0).unwrap();
        assert!(quad.evaluate(-3.0, 0).is_ok());
    }

    #[test]
    fn parabolicity_reports() {
        let r = EnergyDensity::constant(1.0)
            .check_parabolicity(0.1, 10.0, 100)
            .unwrap();
        assert!(r.g_positive && !r.second_derivative_positive);

        let r = EnergyDensity::power_law(-2.0, 1.0)
            .unwrap()
            .check_parabolicity(0.1, 10.0, 100)
            .unwrap();
        assert!(r.holds());

        // s = 2, alpha = 0: G = -c^2, so g = c^2 > 0 but G'' = -2
        let r = EnergyDensity::power_law(2.0, 0.0)
            .unwrap()
            .check_parabolicity(0.1, 10.0, 100)
            .unwrap();
        assert!(r.g_positive && !r.second_derivative_positive);
        assert!(!r.holds());
        assert!((r.min_second_derivative + 2.0).abs() < 1e-12);
        assert!((r.min_g - 0.01).abs() < 1e-12);

        assert!(EnergyDensity::constant(1.0)
            .check_parabolicity(1.0, 1.0, 10)
            .is_err());
        assert!(EnergyDensity::constant(1.0)
            .check_parabolicity(0.0, 1.0, 1)
            .is_err());
    }

    #[test]
    fn tabulated_density_uses_supplied_derivatives() {
        // G(c) = c ln c, the entropy density: G'' = 1/c, g = -c.
        let d = EnergyDensity::tabulated("entropy", ValidRange::new(0.0, f64::INFINITY), |c, k| {
            match k {
                0 => c * c.ln(),
                1 => c.ln() + 1.0,
                2 => 1.0 / c,
                _ => -1.0 / (c * c),
            }
        })
        .unwrap();
        assert!(rel(d.scaling_factor(2.0, 0).unwrap(), -2.0) < 1e-14);
        assert!(rel(d.scaling_factor(2.0, 1).unwrap(), -1.0) < 1e-14);
        assert!(!d.check_parabolicity(0.5, 2.0, 10).unwrap().g_positive);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn central(d: &EnergyDensity, c: f64, order: usize) -> f64 {
            let h = 1e-5 * c;
            (d.evaluate(c + h, order - 1).unwrap() - d.evaluate(c - h, order - 1).unwrap())
                / (2.0 * h)
        }

        proptest! {
            #[test]
            fn scaling_factor_identity(s in -4.0f64..0.9, alpha in 0.0f64..3.0, logc in -3.0f64..3.0) {
                let d = EnergyDensity::power_law(s, alpha).unwrap();
                let c = 10f64.powf(logc);
                let g = d.scaling_factor(c, 0).unwrap();
                let direct = d.evaluate(c, 0).unwrap() - d.evaluate(c, 1).unwrap() * c;
                prop_assert!((g - direct).abs() <= 1e-12 * g.abs().max(direct.abs()).max(d.evaluate(c, 0).unwrap().abs()));
            }

            #[test]
            fn g_prime_negative_for_negative_exponents(s in -4.0f64..-0.01, alpha in 0.01f64..3.0, logc in -3.0f64..3.0) {
                let d = EnergyDensity::power_law(s, alpha).unwrap();
                prop_assert!(d.scaling_factor(10f64.powf(logc), 1).unwrap() < 0.0);
            }

            #[test]
            fn derivatives_match_finite_differences(s in -3.0f64..0.9, alpha in 0.0f64..2.0, logc in -1.0f64..1.0) {
                let d = EnergyDensity::power_law(s, alpha).unwrap();
                let c = 10f64.powf(logc);
                for order in 1..=3 {
                    let exact = d.evaluate(c, order).unwrap();
                    let fd = central(&d, c, order);
                    let scale = exact.abs().max(d.evaluate(c, order - 1).unwrap().abs() / c).max(1e-8);
                    prop_assert!((exact - fd).abs() <= 1e-6 * scale, "order {} exact {} fd {}", order, exact, fd);
                }
            }
        }
    }
}
