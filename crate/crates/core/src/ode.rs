//! Fixed-step scalar RK4 and trapezoidal quadrature.

/// One classical Runge-Kutta step for `dy/dt = f(t, y)`.
pub fn rk4_step<F>(f: &F, t: f64, y: f64, dt: f64) -> f64
where
    F: Fn(f64, f64) -> f64,
{
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * dt, y + 0.5 * dt * k1);
    let k3 = f(t + 0.5 * dt, y + 0.5 * dt * k2);
    let k4 = f(t + dt, y + dt * k3);
    y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Time grid `0, dt, 2 dt, ..., t_end`; the last interval is shortened so the
/// grid ends exactly at `t_end`.
pub fn time_grid(t_end: f64, dt: f64) -> Vec<f64> {
    let full = (t_end / dt * (1.0 + 1e-12)).floor() as usize;
    let mut ts: Vec<f64> = (0..=full).map(|i| i as f64 * dt).collect();
    let last = *ts.last().unwrap();
    if t_end - last > 1e-9 * dt {
        ts.push(t_end);
    } else {
        *ts.last_mut().unwrap() = t_end;
    }
    ts
}

/// Integrate on a given time grid, calling `post` on every new state (used
/// for clamping). Returns one state per grid point.
pub fn integrate_on_grid<F, P>(f: &F, ts: &[f64], y0: f64, mut post: P) -> Vec<f64>
where
    F: Fn(f64, f64) -> f64,
    P: FnMut(f64) -> f64,
{
    let mut ys = Vec::with_capacity(ts.len());
    let mut y = y0;
    ys.push(y);
    for w in ts.windows(2) {
        y = post(rk4_step(f, w[0], y, w[1] - w[0]));
        ys.push(y);
    }
    ys
}

/// Trapezoidal rule over (possibly non-uniform) samples.
pub fn trapezoid(ts: &[f64], ys: &[f64]) -> f64 {
    ts.windows(2)
        .zip(ys.windows(2))
        .map(|(t, y)| 0.5 * (t[1] - t[0]) * (y[0] + y[1]))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rk4_exponential_decay() {
        let ts = time_grid(2.0, 0.01);
        let ys = integrate_on_grid(&|_, y| -y, &ts, 1.0, |y| y);
        let exact = (-2.0f64).exp();
        assert!((ys.last().unwrap() - exact).abs() < 1e-9);
    }

    #[test]
    fn grid_lands_on_end() {
        let ts = time_grid(1.0, 0.3);
        assert_eq!(ts.len(), 5);
        assert_eq!(*ts.last().unwrap(), 1.0);
        let ts = time_grid(1.0, 0.1);
        assert_eq!(ts.len(), 11);
        assert_eq!(*ts.last().unwrap(), 1.0);
        assert!(ts.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn trapezoid_is_exact_for_lines() {
        let ts = [0.0, 0.5, 2.0];
        let ys: Vec<f64> = ts.iter().map(|t| 3.0 * t + 1.0).collect();
        assert!((trapezoid(&ts, &ys) - 8.0).abs() < 1e-14);
    }
}
