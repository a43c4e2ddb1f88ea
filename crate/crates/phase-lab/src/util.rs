//! Small shared helpers: branch reduction, circle metric, worker pool setup.

use std::f64::consts::PI;
use std::sync::Once;

/// Reduce an angle to the principal branch `(-π, π]`.
pub fn principal_angle(theta: f64) -> f64 {
    let tau = 2.0 * PI;
    let mut r = theta.rem_euclid(tau);
    if r > PI {
        r -= tau;
    }
    // rem_euclid can return exactly 2π for inputs just below 0 after rounding.
    if r <= -PI {
        r += tau;
    }
    r
}

/// Distance between two angles on the circle: `min_k |a - b + 2πk|`.
pub fn circle_distance(a: f64, b: f64) -> f64 {
    principal_angle(a - b).abs()
}

static POOL_INIT: Once = Once::new();

/// Install the global worker pool, honoring the `PHASE_LAB_THREADS` cap.
///
/// Safe to call repeatedly; only the first call takes effect.
pub fn init_worker_pool() {
    POOL_INIT.call_once(|| {
        if let Some(n) = thread_cap() {
            // Ignore failure: a pool may already exist in test harnesses.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    });
}

fn thread_cap() -> Option<usize> {
    let raw = std::env::var("PHASE_LAB_THREADS").ok()?;
    match raw.trim().parse::<usize>() {
        Ok(n) if n >= 1 => Some(n),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn principal_branch_is_half_open() {
        assert_eq!(principal_angle(PI), PI);
        assert!((principal_angle(-PI) - PI).abs() < 1e-15);
        assert!((principal_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert!(principal_angle(2.0 * PI).abs() < 1e-12);
        assert!((principal_angle(-0.5) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn circle_metric_wraps() {
        assert!(circle_distance(PI - 1e-3, -PI + 1e-3) < 2.1e-3);
        assert!((circle_distance(0.25, -0.25) - 0.5).abs() < 1e-15);
        assert!(circle_distance(2.0 * PI, 0.0) < 1e-12);
    }

    #[test]
    fn branch_reduction_is_idempotent() {
        for k in -20..20 {
            let x = 0.37 * k as f64;
            let once = principal_angle(x);
            let twice = principal_angle(once);
            assert!((once - twice).abs() < 1e-15);
            assert!(once > -PI && once <= PI);
        }
    }
}
