use crate::arrangement::{Arrangement, ArrangementError, FieldTag, Subspace};
use crate::linalg::{rank, Matrix, Tolerance};
use crate::scalar::Real;

/// Subspace of `C^ambient` given by `k` rows `re + i*im`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSubspace<T> {
    re: Matrix<T>,
    im: Matrix<T>,
}

/// Rows `(a, b)` and `(-b, a)` for each complex row `a + ib`: the real span of
/// these equals the complex span viewed in `R^{2l}`.
fn realify<T: Real>(re: &Matrix<T>, im: &Matrix<T>) -> Matrix<T> {
    let (k, l) = re.shape();
    Matrix::from_fn(2 * k, 2 * l, |r, c| {
        let (row, rot) = (r / 2, r % 2 == 1);
        let (a, b) = (re[(row, c % l)], im[(row, c % l)]);
        match (rot, c < l) {
            (false, true) => a,
            (false, false) => b,
            (true, true) => -b,
            (true, false) => a,
        }
    })
}

impl<T: Real> ComplexSubspace<T> {
    /// Rows must be linearly independent over `C`.
    pub fn new(re: Matrix<T>, im: Matrix<T>, tol: &Tolerance<T>) -> Result<Self, ArrangementError> {
        if re.shape() != im.shape() {
            return Err(crate::linalg::LinalgError::ShapeMismatch {
                op: "complex basis",
                left: re.shape(),
                right: im.shape(),
            }
            .into());
        }
        let need = 2 * re.rows();
        let r = rank(&realify(&re, &im), tol);
        if r != need {
            return Err(ArrangementError::ComplexDependent { space: 0, rank: r, need });
        }
        Ok(Self { re, im })
    }

    #[inline]
    pub fn ambient(&self) -> usize {
        self.re.cols()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.re.rows()
    }

    pub fn re(&self) -> &Matrix<T> {
        &self.re
    }

    pub fn im(&self) -> &Matrix<T> {
        &self.im
    }

    /// `span_R{Re v_j, Im v_j}`, which equals `{Re v : v in V}`.
    pub fn real_part_space(&self, tol: &Tolerance<T>) -> Subspace<T> {
        Subspace::span(&Matrix::vstack(self.ambient(), [&self.re, &self.im]), tol)
    }

    pub(crate) fn realified(&self) -> Matrix<T> {
        realify(&self.re, &self.im)
    }
}

/// Replaces every complex space by the real span of its real and imaginary
/// parts. Dependencies survive and each image has dimension at most `2k`.
pub fn complex_to_real<T: Real>(
    ambient: usize,
    spaces: &[ComplexSubspace<T>],
    tol: &Tolerance<T>,
) -> Result<Arrangement<T>, ArrangementError> {
    let real = spaces.iter().map(|s| s.real_part_space(tol)).collect();
    Ok(Arrangement::new(ambient, real)?.with_field(FieldTag::ComplexOrigin))
}

/// `dim_C` of the sum of the given complex spaces.
pub fn complex_dimension<T: Real>(ambient: usize, spaces: &[ComplexSubspace<T>], tol: &Tolerance<T>) -> usize {
    let blocks: Vec<Matrix<T>> = spaces.iter().map(ComplexSubspace::realified).collect();
    rank(&Matrix::vstack(2 * ambient, &blocks), tol) / 2
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(v: &[f64]) -> Matrix<f64> {
        Matrix::from_rows(&[v.to_vec()], v.len()).unwrap()
    }

    #[test]
    fn real_entries_keep_span() {
        let tol = Tolerance::default();
        let s = ComplexSubspace::new(row(&[1.0, 2.0, 0.0]), row(&[0.0; 3]), &tol).unwrap();
        let r = s.real_part_space(&tol);
        assert_eq!(r.dim(), 1);
        assert!(r.same_as(&Subspace::span(&row(&[1.0, 2.0, 0.0]), &tol), &tol));
    }

    #[test]
    fn one_i_spans_plane() {
        let tol = Tolerance::default();
        let s = ComplexSubspace::new(row(&[1.0, 0.0]), row(&[0.0, 1.0]), &tol).unwrap();
        let arr = complex_to_real(2, &[s], &tol).unwrap();
        assert_eq!(arr.space(0).dim(), 2);
        assert_eq!(arr.field(), FieldTag::ComplexOrigin);
    }

    #[test]
    fn complex_dependence_detected() {
        let tol = Tolerance::default();
        // (1, i) and (i, -1) = i * (1, i) are C-proportional
        let re = Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]], 2).unwrap();
        let im = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]], 2).unwrap();
        assert!(matches!(
            ComplexSubspace::new(re, im, &tol),
            Err(ArrangementError::ComplexDependent { rank: 2, need: 4, .. })
        ));
    }

    #[test]
    fn complex_dimension_counts_over_c() {
        let tol = Tolerance::default();
        let a = ComplexSubspace::new(row(&[1.0, 0.0]), row(&[0.0, 1.0]), &tol).unwrap();
        let b = ComplexSubspace::new(row(&[0.0, 1.0]), row(&[-1.0, 0.0]), &tol).unwrap();
        // b = -i * a over C
        assert_eq!(complex_dimension(2, &[a.clone(), b], &tol), 1);
        let c = ComplexSubspace::new(row(&[1.0, 0.0]), row(&[0.0, 0.0]), &tol).unwrap();
        assert_eq!(complex_dimension(2, &[a, c], &tol), 2);
    }
}
