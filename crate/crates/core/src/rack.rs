//! The length-`n̄` code seen when each rack is collapsed to one coordinate:
//! `{w : Σ_e (ξ^{eu})^j w_e = 0, j ∈ [0, n̄−d̄−1]}`, an `[n̄, d̄]` MDS code.

use crate::error::{Error, Result};
use crate::gf::{Elem, Field};
use crate::linalg::{self, Matrix};

#[derive(Debug, Clone)]
pub struct RackMds {
    points: Vec<Elem>,
    dim: usize,
}

impl RackMds {
    pub fn new(field: &Field, xi: Elem, u: usize, nbar: usize, dbar: usize) -> Self {
        let base = field.pow(xi, u as u64);
        let points = (0..nbar as u64).map(|e| field.pow(base, e)).collect();
        RackMds { points, dim: dbar }
    }

    /// `ξ^{eu}` for each rack `e`.
    pub fn points(&self) -> &[Elem] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    /// `(n̄−d̄) × n̄` parity-check matrix.
    pub fn parity_check(&self, field: &Field) -> Matrix {
        let exps: Vec<u64> = (0..(self.len() - self.dim) as u64).collect();
        linalg::vandermonde(field, &self.points, &exps).expect("rack points are distinct")
    }

    pub fn is_codeword(&self, field: &Field, w: &[Elem]) -> bool {
        w.len() == self.len() && self.parity_check(field).mul_vec(field, w).unwrap().iter().all(|e| e.is_zero())
    }

    /// Matrix `R` (`targets × known`) with `w[targets] = R · w[known]` for every
    /// codeword. `known` must name exactly `d̄` distinct racks.
    pub fn recovery_matrix(&self, field: &Field, known: &[usize], targets: &[usize]) -> Result<Matrix> {
        if known.len() != self.dim {
            return Err(Error::InvalidRepair(format!("{} known racks, need {}", known.len(), self.dim)));
        }
        let unknown: Vec<usize> = (0..self.len()).filter(|e| !known.contains(e)).collect();
        if unknown.len() != self.len() - self.dim {
            return Err(Error::InvalidRepair("known racks are not distinct".into()));
        }
        let h = self.parity_check(field);
        let h_unknown = h.select_cols(&unknown);
        let mut rhs = h.select_cols(known);
        for r in 0..rhs.rows() {
            for v in rhs.row_mut(r) {
                *v = field.neg(*v);
            }
        }
        let full =
            if known.is_empty() { Matrix::zeros(unknown.len(), 0) } else { linalg::solve(field, &h_unknown, &rhs)? };
        let mut out = Matrix::zeros(targets.len(), known.len());
        for (t, &target) in targets.iter().enumerate() {
            if let Some(k) = known.iter().position(|&x| x == target) {
                out[(t, k)] = Elem::ONE;
            } else {
                let r = unknown
                    .iter()
                    .position(|&x| x == target)
                    .ok_or_else(|| Error::OutOfRange(format!("rack {target} outside 0..{}", self.len())))?;
                out.row_mut(t).copy_from_slice(full.row(r));
            }
        }
        Ok(out)
    }

    /// Completes a codeword from its values on `known`.
    pub fn complete(&self, field: &Field, known: &[usize], values: &[Elem]) -> Result<Vec<Elem>> {
        let all: Vec<usize> = (0..self.len()).collect();
        Ok(self.recovery_matrix(field, known, &all)?.mul_vec(field, values)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldSpec;

    #[test]
    fn completion_lands_in_the_code() {
        let f = Field::new(FieldSpec::Prime(29)).unwrap();
        let xi = f.find_primitive();
        let code = RackMds::new(&f, xi, 4, 4, 2);
        let w = code.complete(&f, &[0, 1], &[Elem(3), Elem(17)]).unwrap();
        assert_eq!(&w[..2], &[Elem(3), Elem(17)]);
        assert!(code.is_codeword(&f, &w));
        // any other pair recovers the rest
        let again = code.complete(&f, &[3, 1], &[w[3], w[1]]).unwrap();
        assert_eq!(again, w);
    }

    #[test]
    fn zero_dimension_code_is_zero() {
        let f = Field::new(FieldSpec::Prime(13)).unwrap();
        let code = RackMds::new(&f, f.find_primitive(), 4, 2, 0);
        assert_eq!(code.complete(&f, &[], &[]).unwrap(), vec![Elem::ZERO; 2]);
        assert!(code.is_codeword(&f, &[Elem::ZERO, Elem::ZERO]));
        assert!(!code.is_codeword(&f, &[Elem::ONE, Elem::ZERO]));
    }
}
