//! Spheres and circles evolving under the scaled flow.
//!
//! With space-constant concentration the system reduces to the ODE
//! `R' = f(R) = -g(c(R))·d/R` with `c(R) = (m/α_d)·R^{-d}`; its inverse
//! `F(R) = ∫_R^{R0} z / (d·g(c(z))) dz` gives the time at which radius `R`
//! is reached and `F(0)` is the extinction time.

pub mod ode;
pub mod quad;

use std::cell::Cell;
use std::f64::consts::PI;

use thiserror::Error;

use crate::density::{DensityError, DensityKind, EnergyDensity};

pub const DEFAULT_QUAD_TOL: f64 = 1e-10;
const MAX_DYADIC_LEVELS: usize = 200;
const MAX_QUAD_INTERVALS: usize = 4000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RadialError {
    #[error("radius must be positive, got {0}")]
    Domain(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Density(#[from] DensityError),
    #[error("scaling factor g = {g} is not positive at c = {c}")]
    Parabolicity { c: f64, g: f64 },
    #[error("quadrature failed to converge (estimated error {error:e})")]
    Quadrature { error: f64 },
    #[error("integral diverges on the requested interval")]
    NonIntegrable,
}

/// Area of the unit sphere `S^d ⊂ R^{d+1}`: `2π^{(d+1)/2} / Γ((d+1)/2)`.
pub fn unit_sphere_area(d: u32) -> f64 {
    match d {
        1 => 2.0 * PI,
        2 => 4.0 * PI,
        _ => 2.0 * PI.powf(0.5 * (d + 1) as f64) / gamma_half(d + 1),
    }
}

/// `Γ(k/2)` for a positive integer `k`.
fn gamma_half(k: u32) -> f64 {
    let (mut x, mut g) = if k % 2 == 0 { (1.0, 1.0) } else { (0.5, PI.sqrt()) };
    while 2.0 * x < k as f64 {
        g *= x;
        x += 1.0;
    }
    g
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialState {
    pub radius: f64,
    pub dimension: u32,
    pub mass: f64,
    pub alpha_d: f64,
}

impl RadialState {
    pub fn new(radius: f64, dimension: u32, mass: f64) -> Result<Self, RadialError> {
        if !(radius > 0.0) {
            return Err(RadialError::Domain(radius));
        }
        check_params(mass, dimension)?;
        Ok(Self {
            radius,
            dimension,
            mass,
            alpha_d: unit_sphere_area(dimension),
        })
    }

    pub fn concentration(&self) -> f64 {
        self.mass / self.alpha_d * self.radius.powi(-(self.dimension as i32))
    }

    pub fn area(&self) -> f64 {
        self.alpha_d * self.radius.powi(self.dimension as i32)
    }
}

fn check_params(m: f64, d: u32) -> Result<(), RadialError> {
    if !(m > 0.0) || !m.is_finite() {
        return Err(RadialError::InvalidArgument(format!("mass must be positive, got {m}")));
    }
    if d == 0 {
        return Err(RadialError::InvalidArgument("dimension must be at least 1".into()));
    }
    Ok(())
}

/// `c = (m/α_d)·R^{-d}`.
pub fn radial_concentration(m: f64, d: u32, r: f64) -> Result<f64, RadialError> {
    Ok(RadialState::new(r, d, m)?.concentration())
}

/// `f(R) = -g(c(R))·d/R`.
pub fn radial_rhs(density: &EnergyDensity, m: f64, d: u32, r: f64) -> Result<f64, RadialError> {
    let c = radial_concentration(m, d, r)?;
    Ok(-density.scaling_factor(c, 0)? * d as f64 / r)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtinctionStatus {
    Finite(f64),
    Divergent,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtinctionResult {
    pub status: ExtinctionStatus,
    pub quadrature_error: f64,
}

impl ExtinctionResult {
    pub fn time(&self) -> Option<f64> {
        match self.status {
            ExtinctionStatus::Finite(t) => Some(t),
            ExtinctionStatus::Divergent => None,
        }
    }
}

/// Integrand `z / (d·g(c(z)))` of `F`, recording the first non-positive `g`.
struct Integrand<'a> {
    density: &'a EnergyDensity,
    k: f64,
    d: u32,
    bad: Cell<Option<(f64, f64)>>,
}

impl<'a> Integrand<'a> {
    fn new(density: &'a EnergyDensity, m: f64, d: u32) -> Self {
        Self {
            density,
            k: m / unit_sphere_area(d),
            d,
            bad: Cell::new(None),
        }
    }

    fn eval(&self, z: f64) -> f64 {
        let c = self.k * z.powi(-(self.d as i32));
        let g = match self.density.scaling_factor(c, 0) {
            Ok(g) => g,
            // beyond the admissible range (c → ∞ as z → 0): treat like g ≤ 0
            Err(_) => f64::NAN,
        };
        if !(g > 0.0) {
            if self.bad.get().is_none() {
                self.bad.set(Some((c, g)));
            }
            return 0.0;
        }
        z / (self.d as f64 * g)
    }

    fn check(&self) -> Result<(), RadialError> {
        match self.bad.get() {
            Some((c, g)) => Err(RadialError::Parabolicity { c, g }),
            None => Ok(()),
        }
    }
}

/// `F(R) = ∫_R^{R0} z / (d·g(c(z))) dz`, the time needed to shrink from
/// `R0` to `R`. `R = 0` gives the extinction time.
pub fn separation_oracle(
    density: &EnergyDensity,
    m: f64,
    d: u32,
    r0: f64,
    r: f64,
) -> Result<f64, RadialError> {
    separation_oracle_tol(density, m, d, r0, r, DEFAULT_QUAD_TOL)
}

pub fn separation_oracle_tol(
    density: &EnergyDensity,
    m: f64,
    d: u32,
    r0: f64,
    r: f64,
    tol: f64,
) -> Result<f64, RadialError> {
    check_params(m, d)?;
    if !(r0 > 0.0) {
        return Err(RadialError::Domain(r0));
    }
    if !(0.0..=r0).contains(&r) {
        return Err(RadialError::InvalidArgument(format!("need 0 <= R <= R0, got R = {r}")));
    }
    if r == 0.0 {
        return match extinction_time_tol(density, m, d, r0, tol)?.status {
            ExtinctionStatus::Finite(t) => Ok(t),
            ExtinctionStatus::Divergent => Err(RadialError::NonIntegrable),
        };
    }
    let f = Integrand::new(density, m, d);
    let q = quad::integrate(|z| f.eval(z), r, r0, tol, 0.0, MAX_QUAD_INTERVALS);
    f.check()?;
    if !q.converged {
        return Err(RadialError::Quadrature { error: q.error });
    }
    Ok(q.value)
}

/// Extinction time `T = F(0)`, or `Divergent` when the radius never vanishes.
pub fn extinction_time(density: &EnergyDensity, m: f64, d: u32, r0: f64) -> Result<ExtinctionResult, RadialError> {
    extinction_time_tol(density, m, d, r0, DEFAULT_QUAD_TOL)
}

pub fn extinction_time_tol(
    density: &EnergyDensity,
    m: f64,
    d: u32,
    r0: f64,
    tol: f64,
) -> Result<ExtinctionResult, RadialError> {
    check_params(m, d)?;
    if !(r0 > 0.0) {
        return Err(RadialError::Domain(r0));
    }
    if let DensityKind::PowerLaw { s, .. } = density.kind() {
        // integrand ~ z^{sd+1}
        if s * d as f64 + 2.0 <= 0.0 {
            let f = Integrand::new(density, m, d);
            f.eval(r0);
            f.check()?;
            return Ok(ExtinctionResult {
                status: ExtinctionStatus::Divergent,
                quadrature_error: 0.0,
            });
        }
    }
    dyadic_tail(density, m, d, r0, tol)
}

/// Sums `I_k = ∫ over [R0·2^{-k-1}, R0·2^{-k}]` and watches the level
/// ratio `I_k / I_{k-1}`: a ratio settling at or above 1 means divergence,
/// a ratio settling below 1 lets the remaining tail be summed geometrically.
fn dyadic_tail(density: &EnergyDensity, m: f64, d: u32, r0: f64, tol: f64) -> Result<ExtinctionResult, RadialError> {
    let f = Integrand::new(density, m, d);
    let level_tol = tol * 1e-3;
    let mut sum = 0.0;
    let mut qerr = 0.0;
    let mut prev_level: Option<f64> = None;
    let mut ratios: Vec<f64> = Vec::new();
    let mut hi = r0;
    for _ in 0..MAX_DYADIC_LEVELS {
        let lo = 0.5 * hi;
        let q = quad::integrate(|z| f.eval(z), lo, hi, level_tol, 1e-11, MAX_QUAD_INTERVALS);
        f.check()?;
        if !q.converged {
            return Err(RadialError::Quadrature { error: q.error });
        }
        sum += q.value;
        qerr += q.error;
        hi = lo;
        if let Some(p) = prev_level {
            if p > 0.0 {
                ratios.push(q.value / p);
            }
        }
        prev_level = Some(q.value);
        if q.value <= tol * 1e-6 && ratios.last().is_some_and(|r| *r < 1.0) {
            return Ok(ExtinctionResult {
                status: ExtinctionStatus::Finite(sum),
                quadrature_error: qerr + q.value,
            });
        }
        let n = ratios.len();
        if n < 4 {
            continue;
        }
        let r = ratios[n - 1];
        let drift = (ratios[n - 1] - ratios[n - 2]).abs().max((ratios[n - 2] - ratios[n - 3]).abs());
        let settled = drift <= 1e-6 * r.abs().max(1e-300);
        if r >= 1.0 - 1e-9 && ratios[n - 3..].iter().all(|x| *x >= 1.0 - 1e-9) && (settled || n >= 12) {
            return Ok(ExtinctionResult {
                status: ExtinctionStatus::Divergent,
                quadrature_error: qerr,
            });
        }
        if r < 1.0 {
            let tail = q.value * r / (1.0 - r);
            // error of the geometric extrapolation from the ratio drift
            let tail_err = q.value * drift / (1.0 - r).powi(2);
            if tail.abs() <= tol || (settled && tail_err <= tol) {
                return Ok(ExtinctionResult {
                    status: ExtinctionStatus::Finite(sum + tail),
                    quadrature_error: qerr + tail_err,
                });
            }
        }
        if !sum.is_finite() {
            break;
        }
    }
    Err(RadialError::Quadrature { error: f64::INFINITY })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialTrajectory {
    /// `(t, R)` at `t = 0, dt, 2dt, …` up to `t_end` or extinction.
    pub samples: Vec<(f64, f64)>,
    /// Time at which `R` fell below the extinction threshold.
    pub extinction: Option<f64>,
}

/// Integrates `R' = f(R)` and samples the radius every `dt`.
pub fn solve_radial(
    density: &EnergyDensity,
    m: f64,
    d: u32,
    r0: f64,
    t_end: f64,
    dt: f64,
) -> Result<RadialTrajectory, RadialError> {
    check_params(m, d)?;
    if !(r0 > 0.0) {
        return Err(RadialError::Domain(r0));
    }
    if !(dt > 0.0) || !(t_end >= 0.0) {
        return Err(RadialError::InvalidArgument(format!("need dt > 0 and t_end >= 0, got dt = {dt}, t_end = {t_end}")));
    }
    radial_rhs(density, m, d, r0)?;
    let rhs = |r: f64| {
        if r > 0.0 {
            radial_rhs(density, m, d, r).ok().filter(|v| v.is_finite())
        } else {
            None
        }
    };
    let floor = 1e-9 * r0;
    let tol = ode::Tolerances::default();
    let mut samples = vec![(0.0, r0)];
    let (mut t, mut r) = (0.0, r0);
    let mut h = tol.h_init * r0 * r0;
    let steps = (t_end / dt).ceil() as usize;
    for k in 1..=steps {
        let t_next = (k as f64 * dt).min(t_end);
        match ode::integrate(rhs, |y| y < floor, t, r, t_next, h, &tol) {
            ode::Outcome::Reached { y, h_next } => {
                t = t_next;
                r = y;
                h = h_next;
                samples.push((t, r));
            }
            ode::Outcome::Stopped { t: te, y } | ode::Outcome::TooManySteps { t: te, y } => {
                samples.push((te, y.max(0.0)));
                return Ok(RadialTrajectory {
                    samples,
                    extinction: Some(te),
                });
            }
        }
    }
    Ok(RadialTrajectory {
        samples,
        extinction: None,
    })
}
