use crate::scalar::{Coeff, Field};

/// Solves `m · x = rhs` by Gaussian elimination, with the matrix over the
/// constants `F` and the right-hand side over any coefficient ring on `F`.
///
/// Pivots are chosen by largest magnitude, which is harmless in exact
/// domains and stabilizes float runs. Returns `None` for a singular matrix.
pub fn solve_linear<F, S>(mut m: Vec<Vec<F>>, mut rhs: Vec<S>) -> Option<Vec<S>>
where
    F: Field,
    S: Coeff<Field = F>,
{
    let size = rhs.len();
    assert!(m.len() == size && m.iter().all(|row| row.len() == size));
    for col in 0..size {
        let pivot = (col..size)
            .filter(|&r| !m[r][col].is_zero())
            .max_by(|&a, &b| {
                m[a][col]
                    .magnitude()
                    .partial_cmp(&m[b][col].magnitude())
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(b.cmp(&a))
            })?;
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        let inv = m[col][col].inv().ok()?;
        for r in 0..size {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].mul_ref(&inv);
            for c in col..size {
                let delta = m[col][c].mul_ref(&factor);
                m[r][c] -= &delta;
            }
            let delta = rhs[col].scale(&factor);
            rhs[r] -= &delta;
        }
    }
    Some(
        rhs.iter()
            .enumerate()
            .map(|(i, r)| r.scale(&m[i][i].inv().expect("nonzero pivot")))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ParamPoly, Rational};

    fn q(v: i64) -> Rational {
        Rational::from_integer(v.into())
    }

    #[test]
    fn small_exact_system() {
        let m = vec![vec![q(0), q(2)], vec![q(3), q(1)]];
        let x = solve_linear(m, vec![q(4), q(5)]).unwrap();
        assert_eq!(x, vec![q(1), q(2)]);
    }

    #[test]
    fn parameter_right_hand_side() {
        let m = vec![vec![q(4)]];
        let rhs = vec![ParamPoly::from_coeffs(vec![q(2), q(8)])];
        let x = solve_linear(m, rhs).unwrap();
        assert_eq!(x[0], ParamPoly::from_coeffs(vec![Rational::new(1.into(), 2.into()), q(2)]));
    }

    #[test]
    fn singular_system() {
        let m = vec![vec![q(1), q(2)], vec![q(2), q(4)]];
        assert!(solve_linear(m, vec![q(1), q(1)]).is_none());
    }
}
