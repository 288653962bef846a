//! Scalar Dormand–Prince 5(4) integrator with step-size control.

// Autonomous right-hand side, so the node abscissae are not needed.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// 5th-order solution minus embedded 4th-order solution.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rtol: 1e-11,
            atol: 1e-14,
            h_init: 1e-4,
            h_min: 1e-16,
            max_steps: 2_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome {
    Reached { y: f64, h_next: f64 },
    /// `stop(y)` fired or the right-hand side became unusable at time `t`.
    Stopped { t: f64, y: f64 },
    TooManySteps { t: f64, y: f64 },
}

/// Integrates `y' = f(y)` from `(t0, y0)` to `t1`.
///
/// `f` returns `None` outside its domain, which rejects the trial step.
/// Integration stops early once `stop(y)` holds or the step size collapses.
pub fn integrate<F, S>(f: F, stop: S, t0: f64, y0: f64, t1: f64, h0: f64, tol: &Tolerances) -> Outcome
where
    F: Fn(f64) -> Option<f64>,
    S: Fn(f64) -> bool,
{
    let (mut t, mut y) = (t0, y0);
    let mut h = h0.min(t1 - t0).max(tol.h_min);
    let Some(mut k0) = f(y) else {
        return Outcome::Stopped { t, y };
    };
    let mut steps = 0;
    while t < t1 {
        if stop(y) {
            return Outcome::Stopped { t, y };
        }
        if steps >= tol.max_steps {
            return Outcome::TooManySteps { t, y };
        }
        steps += 1;
        let last = t + h >= t1;
        let hh = if last { t1 - t } else { h };
        match try_step(&f, y, k0, hh) {
            Some((y_new, k_new, err)) => {
                let scale = tol.atol + tol.rtol * y.abs().max(y_new.abs());
                let ratio = err / scale;
                if ratio <= 1.0 {
                    t = if last { t1 } else { t + hh };
                    y = y_new;
                    k0 = k_new;
                    let fac = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
                    h = hh * fac;
                } else {
                    h = hh * (0.9 * ratio.powf(-0.2)).max(0.1);
                }
            }
            None => h = 0.25 * hh,
        }
        if h < tol.h_min * (1.0 + t.abs()) {
            return Outcome::Stopped { t, y };
        }
    }
    Outcome::Reached { y, h_next: h }
}

fn try_step<F: Fn(f64) -> Option<f64>>(f: &F, y: f64, k0: f64, h: f64) -> Option<(f64, f64, f64)> {
    let mut k = [0.0; 7];
    k[0] = k0;
    for s in 1..7 {
        let ys = y + h * (0..s).map(|j| A[s][j] * k[j]).sum::<f64>();
        k[s] = f(ys)?;
    }
    let y_new = y + h * (0..6).map(|j| A[6][j] * k[j]).sum::<f64>();
    let err = (h * (0..7).map(|j| E[j] * k[j]).sum::<f64>()).abs();
    y_new.is_finite().then_some((y_new, k[6], err))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let tol = Tolerances::default();
        match integrate(|y| Some(-y), |_| false, 0.0, 1.0, 2.0, 1e-3, &tol) {
            Outcome::Reached { y, .. } => assert!((y - (-2f64).exp()).abs() < 1e-10),
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn stops_at_blow_down() {
        // y' = -1/(2y), y(0) = 1 => y = sqrt(1 - t), vanishing at t = 1
        let tol = Tolerances::default();
        let out = integrate(
            |y| (y > 0.0).then(|| -0.5 / y),
            |y| y < 1e-9,
            0.0,
            1.0,
            2.0,
            1e-3,
            &tol,
        );
        match out {
            Outcome::Stopped { t, .. } => assert!((t - 1.0).abs() < 1e-8, "{t}"),
            o => panic!("{o:?}"),
        }
    }
}
