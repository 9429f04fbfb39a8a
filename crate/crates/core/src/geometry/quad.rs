//! Gauss–Legendre rules and deterministic pairwise summation.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Nodes and weights of the `n`-point Gauss–Legendre rule on [-1, 1],
/// computed by Newton iteration on the Legendre recurrence and cached.
pub fn gauss_legendre(n: usize) -> Arc<(Vec<f64>, Vec<f64>)> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<(Vec<f64>, Vec<f64>)>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&n) {
        return hit.clone();
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            // Legendre P_n and P_n' at x via the three-term recurrence.
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        // Recompute the derivative at the converged node for the weight.
        let (mut p0, mut p1) = (1.0, x);
        for k in 2..=n {
            let kf = k as f64;
            let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
            p0 = p1;
            p1 = p2;
        }
        let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    let entry = Arc::new((nodes, weights));
    cache.lock().unwrap().insert(n, entry.clone());
    entry
}

/// `n`-point rule mapped to [a, b].
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let rule = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let nodes = rule.0.iter().map(|t| mid + half * t).collect();
    let weights = rule.1.iter().map(|w| w * half).collect();
    (nodes, weights)
}

const SEQ_CHUNK: usize = 256;

/// Sum `f(0) + … + f(len-1)` by a fixed recursive binary split, parallelized
/// with `rayon::join`. The split points depend only on `len`, so the result
/// is bit-identical for any thread count. Errors propagate with preference
/// for the lowest index.
pub fn pairwise_sum<E, F>(len: usize, f: &F) -> Result<f64, E>
where
    F: Fn(usize) -> Result<f64, E> + Sync,
    E: Send,
{
    fn rec<E, F>(lo: usize, hi: usize, f: &F) -> Result<f64, E>
    where
        F: Fn(usize) -> Result<f64, E> + Sync,
        E: Send,
    {
        if hi - lo <= SEQ_CHUNK {
            let mut acc = 0.0;
            for i in lo..hi {
                acc += f(i)?;
            }
            return Ok(acc);
        }
        let mid = lo + (hi - lo) / 2;
        let (a, b) = rayon::join(|| rec(lo, mid, f), || rec(mid, hi, f));
        Ok(a? + b?)
    }
    if len == 0 {
        return Ok(0.0);
    }
    rec(0, len, f)
}
