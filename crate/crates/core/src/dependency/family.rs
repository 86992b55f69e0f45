use crate::dependency::DependencyError;

/// Idempotent Latin square of order `r >= 3`: `L(x, x) = x`, every row and
/// column a permutation.
fn idempotent_latin(r: usize) -> impl Fn(usize, usize) -> usize {
    // odd order: L(x, y) = (x + y) / 2 mod r
    let odd = move |m: usize, x: usize, y: usize| (x + y) * m.div_ceil(2) % m;
    move |x, y| {
        if r % 2 == 1 {
            return odd(r, x, y);
        }
        // even order: prolongation of the odd square on Z_{r-1} along the
        // transversal (i, i+1); symbols on it move to the new row/column.
        let m = r - 1;
        match (x == m, y == m) {
            (true, true) => m,
            (false, true) => odd(m, x, (x + 1) % m),
            (true, false) => odd(m, (y + m - 1) % m, y),
            (false, false) if y == (x + 1) % m => m,
            (false, false) => odd(m, x, y),
        }
    }
}

/// `r^2 - r` triples over `0..r`, one per ordered pair `x != y`, namely
/// `{x, y, L(x, y)}` for an idempotent Latin square `L`.
///
/// Every element lies in exactly `3(r-1)` triples and every pair in at most 6.
pub fn build_triple_family(r: usize) -> Result<Vec<[usize; 3]>, DependencyError> {
    if r < 3 {
        return Err(DependencyError::FamilyTooSmall(r));
    }
    let l = idempotent_latin(r);
    let mut out = Vec::with_capacity(r * (r - 1));
    for x in 0..r {
        for y in 0..r {
            if x != y {
                let mut t = [x, y, l(x, y)];
                t.sort_unstable();
                out.push(t);
            }
        }
    }
    Ok(out)
}
