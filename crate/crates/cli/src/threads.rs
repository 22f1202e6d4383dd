use std::env;

pub const THREADS_CAP_VAR: &str = "LLP_THREADS_CAP";

/// The cap from `LLP_THREADS_CAP`, if set to a positive integer.
pub fn threads_cap() -> Option<usize> {
    env::var(THREADS_CAP_VAR)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&cap: &usize| cap > 0)
}

/// Clamps each count to `cap`, dropping duplicates created by clamping.
pub fn apply_cap(threads: &[usize], cap: Option<usize>) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::with_capacity(threads.len());
    for &t in threads {
        let t = cap.map_or(t, |c| t.min(c));
        if !out.contains(&t) {
            out.push(t);
        }
    }
    out
}
