//! Adaptive Dormand–Prince 5(4) integration for small fixed-size systems.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B_ERR: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Debug, Clone, Copy)]
pub struct OdeTolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_steps: usize,
}

/// Integrates y' = f(x, y) from x0 to x1 > x0 and returns y(x1).
pub fn integrate<const N: usize>(
    f: impl Fn(f64, &[f64; N]) -> [f64; N],
    x0: f64,
    x1: f64,
    y0: [f64; N],
    first_step: f64,
    tol: &OdeTolerance,
) -> Result<[f64; N]> {
    let mut x = x0;
    let mut y = y0;
    let mut h = first_step.min(x1 - x0);
    let mut k = [[0.0; N]; 7];
    k[0] = f(x, &y);
    for _ in 0..tol.max_steps {
        if x >= x1 {
            return Ok(y);
        }
        let last = x + h >= x1;
        if last {
            h = x1 - x;
        }
        for s in 1..7 {
            let mut ys = y;
            for (i, v) in ys.iter_mut().enumerate() {
                *v += h * (0..s).map(|j| A[s][j] * k[j][i]).sum::<f64>();
            }
            k[s] = f(x + C[s] * h, &ys);
        }
        // the 7th stage is evaluated at the 5th-order solution
        let mut y_new = y;
        for (i, v) in y_new.iter_mut().enumerate() {
            *v += h * (0..6).map(|j| A[6][j] * k[j][i]).sum::<f64>();
        }
        let mut err = 0.0f64;
        for i in 0..N {
            let e = h * (0..7).map(|j| B_ERR[j] * k[j][i]).sum::<f64>();
            let sc = tol.abs + tol.rel * y[i].abs().max(y_new[i].abs());
            err = err.max((e / sc).abs());
        }
        if !err.is_finite() {
            h *= 0.1;
            continue;
        }
        if err <= 1.0 {
            x = if last { x1 } else { x + h };
            y = y_new;
            k[0] = k[6];
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
    }
    Err(Error::Unconverged { value: f64::NAN, error_estimate: f64::INFINITY })
}
