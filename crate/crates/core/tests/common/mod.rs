#![allow(dead_code)]

pub mod tables;
pub mod reference_fits;

use simplexfactor::align::match_rows_by_cosine;
use simplexfactor::Matrix;

pub fn reference(coef: &[[f64; 3]; 30], basis: &[[f64; 3]; 18]) -> (Matrix, Matrix) {
    (Matrix::from_rows(coef).unwrap(), Matrix::from_rows(basis).unwrap().transpose())
}

/// Aligns `(w, g)` to the reference basis by cosine matching and returns
/// the max-abs coefficient and basis deviations.
pub fn aligned_errors(w: &Matrix, g: &Matrix, ref_w: &Matrix, ref_g: &Matrix) -> (f64, f64, Vec<usize>) {
    let perm = match_rows_by_cosine(ref_g, g);
    let g2 = g.select_rows(&perm);
    let w2 = w.select_cols(&perm);
    (w2.max_abs_diff(ref_w), g2.max_abs_diff(ref_g), perm)
}
