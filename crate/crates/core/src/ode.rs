//! Fixed-step classical Runge-Kutta integration.

/// One RK4 step of size `h` from `(t, y)`.
pub fn rk4_step<const D: usize, F>(rhs: &F, t: f64, y: &[f64; D], h: f64) -> [f64; D]
where
    F: Fn(f64, &[f64; D]) -> [f64; D],
{
    let offset = |base: &[f64; D], k: &[f64; D], scale: f64| {
        let mut out = *base;
        for (o, k) in out.iter_mut().zip(k) {
            *o += scale * k;
        }
        out
    };
    let k1 = rhs(t, y);
    let k2 = rhs(t + 0.5 * h, &offset(y, &k1, 0.5 * h));
    let k3 = rhs(t + 0.5 * h, &offset(y, &k2, 0.5 * h));
    let k4 = rhs(t + h, &offset(y, &k3, h));
    let mut next = *y;
    for i in 0..D {
        next[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    next
}

/// Sample times `0, h, 2h, ..., horizon`. The last interval is shortened so
/// the grid ends exactly on `horizon`. Times are computed as `i * h`, never
/// accumulated, so the grid is reproducible bit-for-bit.
pub fn time_grid(horizon: f64, h: f64) -> impl Iterator<Item = f64> {
    let full = libm::floor(horizon / h + 1e-9) as usize;
    let last = full as f64 * h;
    let tail = (horizon - last > 1e-12 * horizon.max(h)).then_some(horizon);
    (0..=full).map(move |i| (i as f64 * h).min(horizon)).chain(tail)
}

/// Integrates `y' = rhs(t, y)` from `y(0) = y0` to `horizon`, calling
/// `observe` at every grid point including `t = 0`.
pub fn integrate<const D: usize, F, O>(rhs: F, y0: [f64; D], horizon: f64, h: f64, mut observe: O)
where
    F: Fn(f64, &[f64; D]) -> [f64; D],
    O: FnMut(f64, &[f64; D]),
{
    let mut y = y0;
    let mut prev = 0.0;
    for (i, t) in time_grid(horizon, h).enumerate() {
        if i > 0 {
            y = rk4_step(&rhs, prev, &y, t - prev);
        }
        observe(t, &y);
        prev = t;
    }
}
