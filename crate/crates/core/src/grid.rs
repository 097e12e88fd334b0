//! Scan grids and seeded Latin-hypercube designs.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{HarvestError, Result};

pub fn linspace(a: f64, b: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 || !(b > a) || !a.is_finite() || !b.is_finite() {
        return Err(HarvestError::Domain(format!("linspace needs a < b and n >= 2, got [{a}, {b}], n = {n}")));
    }
    let last = (n - 1) as f64;
    Ok((0..n).map(|i| if i == n - 1 { b } else { a + (b - a) * i as f64 / last }).collect())
}

pub fn logspace(a: f64, b: f64, n: usize) -> Result<Vec<f64>> {
    if !(a > 0.0) {
        return Err(HarvestError::Domain(format!("logspace needs positive bounds, got {a}")));
    }
    let mut v: Vec<f64> = linspace(a.ln(), b.ln(), n)?.into_iter().map(f64::exp).collect();
    v[0] = a;
    v[n - 1] = b;
    Ok(v)
}

/// `n` points in the box `bounds`, one per stratum along every axis.
pub fn latin_hypercube(n: usize, bounds: &[(f64, f64)], seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = vec![vec![0.0; bounds.len()]; n];
    for (d, &(lo, hi)) in bounds.iter().enumerate() {
        let mut strata: Vec<usize> = (0..n).collect();
        strata.shuffle(&mut rng);
        for (i, s) in strata.into_iter().enumerate() {
            let u: f64 = rng.random();
            points[i][d] = lo + (hi - lo) * (s as f64 + u) / n as f64;
        }
    }
    points
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_exact() {
        let g = linspace(10e3, 50e3, 81).unwrap();
        assert_eq!(g[0], 10e3);
        assert_eq!(g[80], 50e3);
        assert!((g[1] - 10.5e3).abs() < 1e-9);
        let g = logspace(1e-3, 1e2, 6).unwrap();
        assert_eq!(g[5], 1e2);
        assert!((g[1] / g[0] - 10.0).abs() < 1e-12);
        assert!(linspace(1.0, 1.0, 3).is_err());
    }

    #[test]
    fn hypercube_is_stratified_and_seeded() {
        let b = [(0.1, 3.0), (0.0, 5.0), (0.5, 12.0)];
        let pts = latin_hypercube(200, &b, 42);
        assert_eq!(pts, latin_hypercube(200, &b, 42));
        for (d, &(lo, hi)) in b.iter().enumerate() {
            let mut seen = [false; 200];
            for p in &pts {
                let s = ((p[d] - lo) / (hi - lo) * 200.0) as usize;
                assert!(!seen[s]);
                seen[s] = true;
            }
        }
    }
}
