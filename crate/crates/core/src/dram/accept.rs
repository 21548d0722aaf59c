//! Delayed-rejection acceptance probabilities, computed in log space.
//!
//! For a path `x, y1, ..., yi` of successively rejected proposals the
//! stage-i acceptance probability is `alpha_i = min(1, N_i / D_i)` with
//!
//! ```text
//! D_1 = pi(x)  q1(x, y1)
//! D_i = q_i(x, ..., y_i) (D_{i-1} - N_{i-1})
//! ```
//!
//! and `N_i` equal to `D_i` evaluated along the reversed path. The
//! recursion is exponential in the stage count, which is fine for the
//! handful of stages used in practice.

use nalgebra::DVector;

/// `log(exp(a) - exp(b))`, or `-inf` when the difference is non-positive.
pub fn log_sub_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY || b >= a {
        return f64::NEG_INFINITY;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    a + (-((b - a).exp())).ln_1p()
}

/// log D_k along the given path. `log_q(stage, from, to)` is the log
/// density of the stage's proposal kernel; stage-k proposals are centered
/// on the path origin, so only the endpoints enter.
fn log_d<F>(xs: &[&DVector<f64>], log_pi: &[f64], log_q: &F) -> f64
where
    F: Fn(usize, &DVector<f64>, &DVector<f64>) -> f64,
{
    let k = xs.len() - 1;
    debug_assert!(k >= 1);
    if k == 1 {
        return log_pi[0] + log_q(1, xs[0], xs[1]);
    }
    let d_prev = log_d(&xs[..k], &log_pi[..k], log_q);
    let rev_x: Vec<&DVector<f64>> = xs[..k].iter().rev().copied().collect();
    let rev_p: Vec<f64> = log_pi[..k].iter().rev().copied().collect();
    let n_prev = log_d(&rev_x, &rev_p, log_q);
    log_q(k, xs[0], xs[k]) + log_sub_exp(d_prev, n_prev)
}

/// `log alpha_i` for the full path `x, y1, ..., yi`.
pub fn dr_log_alpha<F>(xs: &[&DVector<f64>], log_pi: &[f64], log_q: &F) -> f64
where
    F: Fn(usize, &DVector<f64>, &DVector<f64>) -> f64,
{
    debug_assert!(xs.len() >= 2 && xs.len() == log_pi.len());
    let denom = log_d(xs, log_pi, log_q);
    let rev_x: Vec<&DVector<f64>> = xs.iter().rev().copied().collect();
    let rev_p: Vec<f64> = log_pi.iter().rev().copied().collect();
    let numer = log_d(&rev_x, &rev_p, log_q);
    if denom == f64::NEG_INFINITY {
        // current state unreachable in reverse: accept anything with mass
        if numer > f64::NEG_INFINITY {
            0.0
        } else {
            f64::NEG_INFINITY
        }
    } else {
        (numer - denom).min(0.0)
    }
}
