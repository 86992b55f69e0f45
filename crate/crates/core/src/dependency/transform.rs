use num_rational::Ratio;

use crate::arrangement::{Arrangement, Subspace};
use crate::dependency::{validate_system, DepSet, DependencyError, TripleSystem};
use crate::linalg::{Matrix, Tolerance};
use crate::rational::{format_rational, times_count, Rational};
use crate::scalar::Real;

/// Result of [`prune_low_degree`]: `kept[new] = old`.
#[derive(Debug, Clone)]
pub struct Pruned<T> {
    pub arrangement: Arrangement<T>,
    pub system: TripleSystem,
    pub kept: Vec<usize>,
}

/// Result of [`map_and_clean`]: `kept[new] = old` over the surviving nonzero images.
#[derive(Debug, Clone)]
pub struct Cleaned<T> {
    pub arrangement: Arrangement<T>,
    pub system: TripleSystem,
    pub delta: Rational,
    pub kept: Vec<usize>,
}

fn relabel(kept: &[usize], n: usize) -> Vec<Option<usize>> {
    let mut phi = vec![None; n];
    for (new, &old) in kept.iter().enumerate() {
        phi[old] = Some(new);
    }
    phi
}

/// Repeatedly drops every space lying in fewer than `delta * n / 2` live sets,
/// together with those sets. `n` stays the original count throughout. The
/// survivors carry an `(alpha, delta/2)`-system.
pub fn prune_low_degree<T: Real>(
    arr: &Arrangement<T>,
    sys: &TripleSystem,
    delta: Rational,
    tol: &Tolerance<T>,
) -> Result<Pruned<T>, DependencyError> {
    let n = sys.n();
    let dn = times_count(&delta, n);
    if Ratio::from_integer(sys.w() as u64) < dn * Ratio::from_integer(n as u64) {
        return Err(DependencyError::Precondition(format!(
            "pruning needs w >= delta*n^2 = {}, have w = {}",
            format_rational(&(dn * Ratio::from_integer(n as u64))),
            sys.w()
        )));
    }
    let half = dn / Ratio::from_integer(2);
    let mut alive = vec![true; n];
    let mut live_sets = vec![true; sys.w()];
    loop {
        let mut deg = vec![0u64; n];
        for (s, set) in sys.sets().iter().enumerate() {
            if live_sets[s] {
                for &i in set.indices() {
                    deg[i] += 1;
                }
            }
        }
        let doomed: Vec<usize> = (0..n).filter(|&i| alive[i] && Ratio::from_integer(deg[i]) < half).collect();
        if doomed.is_empty() {
            break;
        }
        for &i in &doomed {
            alive[i] = false;
        }
        for (s, set) in sys.sets().iter().enumerate() {
            if live_sets[s] && set.indices().iter().any(|&i| !alive[i]) {
                live_sets[s] = false;
            }
        }
    }
    let kept: Vec<usize> = (0..n).filter(|&i| alive[i]).collect();
    let alpha = Ratio::from_integer(sys.alpha().max(1));
    if Ratio::from_integer(kept.len() as u64) < dn / (alpha * Ratio::from_integer(2)) {
        return Err(DependencyError::Precondition(format!(
            "pruning left {} spaces, fewer than delta*n/(2 alpha); input breaks requirements 1, 2 or 4",
            kept.len()
        )));
    }
    let phi = relabel(&kept, n);
    let sets = sys
        .sets()
        .iter()
        .zip(&live_sets)
        .filter(|(_, &live)| live)
        .map(|(s, _)| match *s {
            DepSet::Pair(p) => DepSet::Pair(p.map(|i| phi[i].unwrap())),
            DepSet::Triple(t) => DepSet::Triple(t.map(|i| phi[i].unwrap())),
        })
        .collect();
    let system = TripleSystem::new(kept.len(), sets, sys.alpha(), delta / Ratio::from_integer(2))?;
    let arrangement = arr.select(&kept);
    let report = validate_system(&arrangement, &system, tol);
    if !report.is_valid() {
        return Err(DependencyError::Invalid(report));
    }
    Ok(Pruned { arrangement, system, kept })
}

/// Maps every space through `P`, removes zero images and relabels. A 3-set
/// losing one member becomes a 2-set of the two (now equal) survivors; sets
/// losing every member vanish. The new `delta` is `delta * n / n'`, so the
/// product `delta * n` is unchanged.
pub fn map_and_clean<T: Real>(
    arr: &Arrangement<T>,
    sys: &TripleSystem,
    p: &Matrix<T>,
    tol: &Tolerance<T>,
) -> Result<Cleaned<T>, DependencyError> {
    let l = arr.ambient();
    if p.shape() != (l, l) {
        return Err(crate::linalg::LinalgError::ShapeMismatch {
            op: "map_and_clean",
            left: p.shape(),
            right: (l, l),
        }
        .into());
    }
    let images: Vec<Subspace<T>> = arr.spaces().iter().map(|s| s.image(p, tol)).collect();
    let kept: Vec<usize> = (0..arr.n()).filter(|&i| !images[i].is_zero()).collect();
    if kept.is_empty() {
        return Err(DependencyError::AllAnnihilated);
    }
    let phi = relabel(&kept, arr.n());
    let mut sets = Vec::with_capacity(sys.w());
    for (j, s) in sys.sets().iter().enumerate() {
        let live: Vec<usize> = s.indices().iter().filter_map(|&i| phi[i]).collect();
        let zeroed = s.len() - live.len();
        match (s.len(), zeroed) {
            (_, 0) => sets.push(match *s {
                DepSet::Pair(p) => DepSet::Pair(p.map(|i| phi[i].unwrap())),
                DepSet::Triple(t) => DepSet::Triple(t.map(|i| phi[i].unwrap())),
            }),
            (3, 1) => sets.push(DepSet::Pair([live[0], live[1]])),
            (len, z) if z == len => {}
            (len, z) => return Err(DependencyError::InconsistentImage { set: j, zeroed: z, size: len }),
        }
    }
    let delta = times_count(&sys.delta(), arr.n()) / Ratio::from_integer(kept.len() as u64);
    let system = TripleSystem::new(kept.len(), sets, sys.alpha(), delta)?;
    let arrangement = Arrangement::new(l, kept.iter().map(|&i| images[i].clone()).collect())?.with_field(arr.field());
    arrangement.validate(tol)?;
    let report = validate_system(&arrangement, &system, tol);
    if !report.is_valid() {
        return Err(DependencyError::Invalid(report));
    }
    Ok(Cleaned { arrangement, system, delta, kept })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::{generate, GeneratorSpec};
    use crate::dependency::build_sg_system;

    fn grouped(k: usize, delta: Rational, n: usize, seed: u64) -> Arrangement<f64> {
        generate(&GeneratorSpec::Grouped { k, delta, n, ambient: None }, seed, &Tolerance::default()).unwrap()
    }

    #[test]
    fn identity_map_is_noop() {
        let tol = Tolerance::default();
        let arr = grouped(1, Ratio::new(1, 2), 8, 3);
        let sys = build_sg_system(&arr, 1, &tol).unwrap();
        let out = map_and_clean(&arr, &sys, &Matrix::identity(arr.ambient()), &tol).unwrap();
        assert_eq!(out.delta, sys.delta());
        assert_eq!(out.system.sets(), sys.sets());
        assert_eq!(out.kept, (0..8).collect::<Vec<_>>());
        for i in 0..8 {
            assert!(out.arrangement.space(i).same_as(arr.space(i), &tol));
        }
    }

    #[test]
    fn killing_one_member_demotes_triple() {
        let tol = Tolerance::default();
        // V_2 = span(e0 + e1) inside span(e0, e1); P kills e0 + e1
        let a = Subspace::coordinate(3, &[0]);
        let b = Subspace::coordinate(3, &[1]);
        let c = Subspace::span(&Matrix::from_rows(&[vec![1.0, 1.0, 0.0]], 3).unwrap(), &tol);
        let arr = Arrangement::new(3, vec![a, b, c]).unwrap();
        let sys = TripleSystem::new(3, vec![DepSet::Triple([0, 1, 2])], 1, Ratio::new(1, 3)).unwrap();
        let u = [1.0 / 2f64.sqrt(), 1.0 / 2f64.sqrt(), 0.0];
        let p = Matrix::from_fn(3, 3, |i, j| if i == j { 1.0 } else { 0.0 } - u[i] * u[j]);
        let out = map_and_clean(&arr, &sys, &p, &tol).unwrap();
        assert_eq!(out.kept, vec![0, 1]);
        assert_eq!(out.system.sets(), &[DepSet::Pair([0, 1])]);
        assert!(out.arrangement.space(0).same_as(out.arrangement.space(1), &tol));
        assert_eq!(out.delta * Ratio::from_integer(2), Ratio::new(1, 3) * Ratio::from_integer(3));
    }

    #[test]
    fn two_zeroed_members_is_error() {
        let tol = Tolerance::default();
        let arr = Arrangement::new(
            3,
            vec![Subspace::coordinate(3, &[0]), Subspace::coordinate(3, &[1]), Subspace::coordinate(3, &[2])],
        )
        .unwrap();
        let sys = TripleSystem::new(3, vec![DepSet::Triple([0, 1, 2])], 1, Ratio::from_integer(0)).unwrap();
        let p = Matrix::from_diagonal(&[0.0, 0.0, 1.0]);
        assert!(matches!(
            map_and_clean(&arr, &sys, &p, &tol),
            Err(DependencyError::InconsistentImage { zeroed: 2, .. })
        ));
    }

    #[test]
    fn generic_map_keeps_system() {
        let tol = Tolerance::default();
        let arr = grouped(2, Ratio::new(1, 2), 8, 4);
        let sys = build_sg_system(&arr, 2, &tol).unwrap();
        let p = Matrix::from_fn(8, 8, |i, j| ((i * 7 + j * 3) % 5) as f64 + if i == j { 4.0 } else { 0.0 });
        let out = map_and_clean(&arr, &sys, &p, &tol).unwrap();
        assert_eq!(out.system.sets(), sys.sets());
        assert_eq!(out.arrangement.n(), 8);
    }

    #[test]
    fn prune_fixed_point_and_isolated() {
        let tol = Tolerance::default();
        let arr = grouped(1, Ratio::from_integer(1), 5, 2);
        let sys = build_sg_system(&arr, 1, &tol).unwrap();
        let pr = prune_low_degree(&arr, &sys, Ratio::new(1, 2), &tol).unwrap();
        assert_eq!(pr.kept, (0..5).collect::<Vec<_>>());
        assert_eq!(pr.system.sets(), sys.sets());
        assert_eq!(pr.system.delta(), Ratio::new(1, 4));

        // add an isolated space outside the plane's system
        let mut spaces = arr.spaces().to_vec();
        spaces.push(Subspace::coordinate(arr.ambient(), &[0]));
        let big = Arrangement::new(arr.ambient(), spaces).unwrap();
        let sys6 = TripleSystem::new(6, sys.sets().to_vec(), 6, Ratio::from_integer(0)).unwrap();
        let pr = prune_low_degree(&big, &sys6, Ratio::new(1, 2), &tol).unwrap();
        assert_eq!(pr.kept, (0..5).collect::<Vec<_>>());
        assert_eq!(pr.system.w(), sys.w());
    }

    #[test]
    fn prune_precondition() {
        let tol = Tolerance::default();
        let arr = grouped(1, Ratio::from_integer(1), 4, 2);
        let sys = build_sg_system(&arr, 1, &tol).unwrap();
        // w = 12 < delta*n^2 = 16
        assert!(matches!(
            prune_low_degree(&arr, &sys, Ratio::from_integer(1), &tol),
            Err(DependencyError::Precondition(_))
        ));
    }
}
