#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sgdim::arrangement::{Arrangement, Subspace};
use sgdim::linalg::{Matrix, Svd, Tolerance};
use sgdim::scaling::ScalingState;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng, r: usize, c: usize) -> Matrix<f64> {
    Matrix::from_fn(r, c, |_, _| rng.sample(StandardNormal))
}

pub fn random_arrangement(rng: &mut ChaCha8Rng, n: usize, kmax: usize, ell: usize) -> Arrangement<f64> {
    let tol = Tolerance::default();
    let spaces = (0..n)
        .map(|_| {
            let k = rng.random_range(1..=kmax);
            Subspace::span(&gaussian(rng, k, ell), &tol)
        })
        .collect();
    Arrangement::new(ell, spaces).unwrap()
}

pub fn random_rotation(rng: &mut ChaCha8Rng, k: usize) -> Matrix<f64> {
    let svd = Svd::new(&gaussian(rng, k, k));
    svd.u.matmul(&svd.vt)
}

/// Spanning arrangement with random weights, log-scales and rotations.
pub fn random_state(rng: &mut ChaCha8Rng) -> ScalingState<f64> {
    let ell: usize = rng.random_range(2..=8);
    let n = rng.random_range(ell.div_ceil(3).max(2)..=6);
    loop {
        let arr = random_arrangement(rng, n, 3, ell);
        if arr.dimension(&Tolerance::default()) < ell {
            continue;
        }
        let p: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
        let t: Vec<f64> = (0..arr.total_rows()).map(|_| rng.random_range(-1.5..1.5)).collect();
        let rot = arr.spaces().iter().map(|s| random_rotation(rng, s.dim())).collect();
        return ScalingState::from_parts(&arr, &p, t, rot).unwrap();
    }
}

/// Groups of 3 or 4 `k`-spaces, each group inside its own random
/// `2k`-dimensional frame: `[I 0]`, `[0 I]` and `[I +-Q] / sqrt 2` in frame
/// coordinates. Every pair inside a group has largest cosine at most
/// `1 / sqrt 2`, so the groups are 1/4-separated.
pub fn separated_groups(rng: &mut ChaCha8Rng, k: usize, sizes: &[usize]) -> Arrangement<f64> {
    let tol = Tolerance::default();
    let ell = 2 * k * sizes.len();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut spaces = Vec::new();
    for &r in sizes {
        assert!((3..=4).contains(&r));
        let frame = Subspace::span(&gaussian(rng, 2 * k, ell), &tol);
        let q = random_rotation(rng, k);
        let local = |sign: f64, which: usize| {
            Matrix::from_fn(k, 2 * k, |i, j| match which {
                0 => (j == i) as u8 as f64,
                1 => (j == k + i) as u8 as f64,
                _ if j < k => s * (j == i) as u8 as f64,
                _ => sign * s * q[(i, j - k)],
            })
        };
        let mut blocks = vec![local(1.0, 0), local(1.0, 1), local(1.0, 2)];
        if r == 4 {
            blocks.push(local(-1.0, 2));
        }
        for b in blocks {
            spaces.push(Subspace::from_orthonormal(b.matmul(frame.basis()), &tol).unwrap());
        }
    }
    Arrangement::new(ell, spaces).unwrap()
}
