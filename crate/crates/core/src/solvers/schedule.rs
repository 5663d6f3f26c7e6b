/// Step size at iteration `t >= 1` for a sample of size `n`: decreases
/// linearly from `eta0` by `(eta0 - eta1) / n` per iteration during the first
/// `n` iterations, reaching `eta1` at `t = n`, then stays at `eta1`.
pub fn step_schedule(t: usize, n: usize, eta0: f64, eta1: f64) -> f64 {
    assert!(t >= 1, "iterations are counted from 1");
    assert!(n >= 1, "sample size must be positive");
    if t >= n {
        eta1
    } else {
        eta0 - t as f64 * (eta0 - eta1) / n as f64
    }
}
