use rayon::prelude::*;

use crate::arrangement::{k_bounded_check, pairwise_zero_intersection, Arrangement, Subspace};
use crate::dependency::DependencyError;
use crate::linalg::{rank, Matrix, Tolerance};
use crate::scalar::Real;

/// `V_a ⊆ V_b + V_c` for all three rotations, decided by comparing
/// `dim(V_b + V_c)` with `dim(V_a + V_b + V_c)`.
pub fn is_dependent_triple<T: Real>(v1: &Subspace<T>, v2: &Subspace<T>, v3: &Subspace<T>, tol: &Tolerance<T>) -> bool {
    let amb = v1.ambient();
    let r = |xs: &[&Subspace<T>]| rank(&Matrix::vstack(amb, xs.iter().map(|s| s.basis())), tol);
    let all = r(&[v1, v2, v3]);
    r(&[v2, v3]) == all && r(&[v1, v3]) == all && r(&[v1, v2]) == all
}

/// 2k-dimensional span of a pair that contains at least three members.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecialSpace<T> {
    pub span: Subspace<T>,
    /// Sorted member indices.
    pub members: Vec<usize>,
}

impl<T> SpecialSpace<T> {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

/// Members of `V_a + V_b` for every pair, computed in parallel.
fn pair_members<T: Real>(arr: &Arrangement<T>, tol: &Tolerance<T>) -> Vec<((usize, usize), Subspace<T>, Vec<usize>)> {
    let n = arr.n();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .filter(|&(a, b)| !arr.space(a).is_zero() && !arr.space(b).is_zero())
        .collect();
    pairs
        .into_par_iter()
        .map(|(a, b)| {
            let span = Subspace::sum(arr.ambient(), [arr.space(a), arr.space(b)], tol);
            let members = (0..n)
                .filter(|&i| !arr.space(i).is_zero() && span.contains(arr.space(i), tol))
                .collect();
            ((a, b), span, members)
        })
        .collect()
}

/// All special spaces. Requires pairwise zero intersection so each pair spans a
/// unique `2k`-space; member lists are maximal and no member set repeats.
pub fn find_special_spaces<T: Real>(
    arr: &Arrangement<T>,
    k: usize,
    tol: &Tolerance<T>,
) -> Result<Vec<SpecialSpace<T>>, DependencyError> {
    if !k_bounded_check(arr, k) {
        let (index, s) = arr.spaces().iter().enumerate().find(|(_, s)| s.dim() > k).unwrap();
        return Err(DependencyError::NotKBounded { index, dim: s.dim(), k });
    }
    if let Some(&(i, j)) = pairwise_zero_intersection(arr, tol).first() {
        return Err(DependencyError::IntersectingPair(i, j));
    }
    let n = arr.n();
    let mut covered = vec![false; n * n];
    let mut out = Vec::new();
    for ((a, b), span, members) in pair_members(arr, tol) {
        if covered[a * n + b] || members.len() < 3 {
            continue;
        }
        for &x in &members {
            for &y in &members {
                covered[x * n + y] = true;
            }
        }
        out.push(SpecialSpace { span, members });
    }
    Ok(out)
}

/// Every dependent triple `a < b < c`, found pair-first.
pub fn dependent_triples<T: Real>(arr: &Arrangement<T>, tol: &Tolerance<T>) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for ((a, b), _, members) in pair_members(arr, tol) {
        for c in members.into_iter().filter(|&c| c > b) {
            if is_dependent_triple(arr.space(a), arr.space(b), arr.space(c), tol) {
                out.push([a, b, c]);
            }
        }
    }
    out
}
