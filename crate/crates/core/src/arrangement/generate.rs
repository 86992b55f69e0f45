use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::arrangement::{pairwise_zero_intersection, Arrangement, ArrangementError, ComplexSubspace, Subspace};
use crate::linalg::{Matrix, Tolerance};
use crate::rational::{ceil_u64, Rational};
use crate::scalar::Real;

/// Redraw budget when a random draw lands in non-generic position.
const MAX_REDRAWS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorSpec {
    /// `n` spaces of dimension `k` split into `ceil(1/delta)` contiguous groups,
    /// each group inside its own random `2k`-dimensional space. `ambient`
    /// defaults to `2k * ceil(1/delta)`.
    Grouped {
        k: usize,
        delta: Rational,
        n: usize,
        ambient: Option<usize>,
    },
    /// All `span{e_i, e_j}` in `R^ell`, `i < j`, in lexicographic order.
    Grid { ell: usize },
    /// `n - triples` random `k`-spaces followed by `triples` spaces each drawn
    /// inside the sum of two earlier random ones.
    RandomPlanted {
        n: usize,
        k: usize,
        ell: usize,
        triples: usize,
    },
}

fn gaussian<T: Real>(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix<T> {
    Matrix::from_fn(rows, cols, |_, _| T::lit(rng.sample::<f64, _>(StandardNormal)))
}

fn random_subspace<T: Real>(rng: &mut ChaCha8Rng, k: usize, ell: usize, tol: &Tolerance<T>) -> Subspace<T> {
    loop {
        let s = Subspace::span(&gaussian(rng, k, ell), tol);
        if s.dim() == k {
            return s;
        }
    }
}

/// Random `k`-space inside the row span of `frame`.
fn random_inside<T: Real>(rng: &mut ChaCha8Rng, k: usize, frame: &Matrix<T>, tol: &Tolerance<T>) -> Subspace<T> {
    loop {
        let s = Subspace::span(&gaussian(rng, k, frame.rows()).matmul(frame), tol);
        if s.dim() == k {
            return s;
        }
    }
}

pub fn generate<T: Real>(spec: &GeneratorSpec, seed: u64, tol: &Tolerance<T>) -> Result<Arrangement<T>, ArrangementError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match *spec {
        GeneratorSpec::Grid { ell } => {
            if ell < 2 {
                return Err(ArrangementError::Infeasible(format!("grid needs ell >= 2, got {ell}")));
            }
            let spaces = (0..ell)
                .flat_map(|i| (i + 1..ell).map(move |j| (i, j)))
                .map(|(i, j)| Subspace::coordinate(ell, &[i, j]))
                .collect();
            Arrangement::new(ell, spaces)
        }
        GeneratorSpec::Grouped { k, delta, n, ambient } => grouped(&mut rng, k, delta, n, ambient, tol),
        GeneratorSpec::RandomPlanted { n, k, ell, triples } => planted(&mut rng, n, k, ell, triples, tol),
    }
}

fn grouped<T: Real>(
    rng: &mut ChaCha8Rng,
    k: usize,
    delta: Rational,
    n: usize,
    ambient: Option<usize>,
    tol: &Tolerance<T>,
) -> Result<Arrangement<T>, ArrangementError> {
    if k == 0 || *delta.numer() == 0 {
        return Err(ArrangementError::Infeasible("grouped needs k >= 1 and delta > 0".into()));
    }
    let groups = ceil_u64(&delta.recip()) as usize;
    let ell = ambient.unwrap_or(2 * k * groups);
    if 2 * k * groups > ell {
        return Err(ArrangementError::Infeasible(format!(
            "{groups} groups of 2k = {} dimensions do not fit in R^{ell}",
            2 * k
        )));
    }
    if n < 2 * groups {
        return Err(ArrangementError::Infeasible(format!(
            "{n} spaces cannot fill {groups} groups with at least two members each"
        )));
    }
    for _ in 0..MAX_REDRAWS {
        let frames: Vec<Matrix<T>> = (0..groups).map(|_| gaussian(rng, 2 * k, ell)).collect();
        let mut spaces = Vec::with_capacity(n);
        for (g, frame) in frames.iter().enumerate() {
            let size = n / groups + usize::from(g < n % groups);
            spaces.extend((0..size).map(|_| random_inside(rng, k, frame, tol)));
        }
        let arr = Arrangement::new(ell, spaces)?;
        let expect = 2 * k * groups;
        if arr.dimension(tol) == expect && pairwise_zero_intersection(&arr, tol).is_empty() {
            return Ok(arr);
        }
    }
    Err(ArrangementError::Infeasible("no generic grouped draw found".into()))
}

fn planted<T: Real>(
    rng: &mut ChaCha8Rng,
    n: usize,
    k: usize,
    ell: usize,
    triples: usize,
    tol: &Tolerance<T>,
) -> Result<Arrangement<T>, ArrangementError> {
    if k == 0 || 2 * k > ell {
        return Err(ArrangementError::Infeasible(format!("need 1 <= k and 2k <= ell, got k = {k}, ell = {ell}")));
    }
    if triples > n || (triples > 0 && n - triples < 2) {
        return Err(ArrangementError::Infeasible(format!(
            "{triples} planted triples need at least two base spaces among {n}"
        )));
    }
    let base = n - triples;
    for _ in 0..MAX_REDRAWS {
        let mut spaces: Vec<Subspace<T>> = (0..base).map(|_| random_subspace(rng, k, ell, tol)).collect();
        for _ in 0..triples {
            let a = rng.random_range(0..base);
            let b = (a + rng.random_range(1..base)) % base;
            let frame = Matrix::vstack(ell, [spaces[a].basis(), spaces[b].basis()]);
            spaces.push(random_inside(rng, k, &frame, tol));
        }
        let arr = Arrangement::new(ell, spaces)?;
        if pairwise_zero_intersection(&arr, tol).is_empty() {
            return Ok(arr);
        }
    }
    Err(ArrangementError::Infeasible("no generic planted draw found".into()))
}

/// Complex arrangement with planted dependent triples, plus the planted index
/// triples `(a, b, c)` with `V_c ⊆ V_a + V_b`.
#[derive(Debug, Clone)]
pub struct PlantedComplex<T> {
    pub ambient: usize,
    pub spaces: Vec<ComplexSubspace<T>>,
    pub triples: Vec<[usize; 3]>,
}

fn complex_combination<T: Real>(
    rng: &mut ChaCha8Rng,
    k: usize,
    re: &Matrix<T>,
    im: &Matrix<T>,
) -> (Matrix<T>, Matrix<T>) {
    let cr = gaussian(rng, k, re.rows());
    let ci = gaussian(rng, k, re.rows());
    (cr.matmul(re).sub(&ci.matmul(im)), cr.matmul(im).add(&ci.matmul(re)))
}

/// Complex analogue of [`GeneratorSpec::RandomPlanted`] with complex Gaussian
/// entries and complex mixing coefficients.
pub fn generate_complex_planted<T: Real>(
    n: usize,
    k: usize,
    ell: usize,
    triples: usize,
    seed: u64,
    tol: &Tolerance<T>,
) -> Result<PlantedComplex<T>, ArrangementError> {
    if k == 0 || 2 * k > ell {
        return Err(ArrangementError::Infeasible(format!("need 1 <= k and 2k <= ell, got k = {k}, ell = {ell}")));
    }
    if triples > n || (triples > 0 && n - triples < 2) {
        return Err(ArrangementError::Infeasible(format!(
            "{triples} planted triples need at least two base spaces among {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = n - triples;
    let mut spaces = Vec::with_capacity(n);
    while spaces.len() < base {
        let (re, im) = (gaussian(&mut rng, k, ell), gaussian(&mut rng, k, ell));
        if let Ok(s) = ComplexSubspace::new(re, im, tol) {
            spaces.push(s);
        }
    }
    let mut planted = Vec::with_capacity(triples);
    while planted.len() < triples {
        let a = rng.random_range(0..base);
        let b = (a + rng.random_range(1..base)) % base;
        let re = Matrix::vstack(ell, [spaces[a].re(), spaces[b].re()]);
        let im = Matrix::vstack(ell, [spaces[a].im(), spaces[b].im()]);
        let (cre, cim) = complex_combination(&mut rng, k, &re, &im);
        if let Ok(s) = ComplexSubspace::new(cre, cim, tol) {
            planted.push([a, b, spaces.len()]);
            spaces.push(s);
        }
    }
    Ok(PlantedComplex { ambient: ell, spaces, triples: planted })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    #[test]
    fn grouped_half() {
        let tol = Tolerance::default();
        let spec = GeneratorSpec::Grouped { k: 1, delta: Ratio::new(1, 2), n: 6, ambient: None };
        let arr = generate::<f64>(&spec, 3, &tol).unwrap();
        assert_eq!(arr.n(), 6);
        assert_eq!(arr.ambient(), 4);
        assert_eq!(arr.dimension(&tol), 4);
        // first three share a plane
        let plane = Subspace::sum(4, [arr.space(0), arr.space(1)], &tol);
        assert!(plane.contains(arr.space(2), &tol));
        assert!(!plane.contains(arr.space(3), &tol));
    }

    #[test]
    fn grid_four() {
        let arr = generate::<f64>(&GeneratorSpec::Grid { ell: 4 }, 0, &Tolerance::default()).unwrap();
        assert_eq!(arr.n(), 6);
        assert_eq!(arr.dimension(&Tolerance::default()), 4);
    }

    #[test]
    fn infeasible_rejected() {
        let tol = Tolerance::<f64>::default();
        let spec = GeneratorSpec::RandomPlanted { n: 4, k: 3, ell: 5, triples: 0 };
        assert!(matches!(generate(&spec, 0, &tol), Err(ArrangementError::Infeasible(_))));
        let spec = GeneratorSpec::Grouped { k: 2, delta: Ratio::new(1, 2), n: 8, ambient: Some(7) };
        assert!(matches!(generate(&spec, 0, &tol), Err(ArrangementError::Infeasible(_))));
    }

    #[test]
    fn deterministic_per_seed() {
        let tol = Tolerance::<f64>::default();
        let spec = GeneratorSpec::RandomPlanted { n: 10, k: 2, ell: 20, triples: 5 };
        assert_eq!(generate(&spec, 7, &tol).unwrap(), generate(&spec, 7, &tol).unwrap());
        assert_ne!(generate(&spec, 7, &tol).unwrap(), generate(&spec, 8, &tol).unwrap());
    }

    #[test]
    fn complex_planted_contains() {
        let tol = Tolerance::<f64>::default();
        let p = generate_complex_planted(6, 2, 6, 2, 1, &tol).unwrap();
        assert_eq!(p.spaces.len(), 6);
        for [a, b, c] in &p.triples {
            let both = super::super::complex_dimension(6, &[p.spaces[*a].clone(), p.spaces[*b].clone()], &tol);
            let all = super::super::complex_dimension(
                6,
                &[p.spaces[*a].clone(), p.spaces[*b].clone(), p.spaces[*c].clone()],
                &tol,
            );
            assert_eq!(both, all);
        }
    }
}
