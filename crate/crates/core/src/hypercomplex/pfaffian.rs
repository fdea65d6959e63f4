use nalgebra::DMatrix;
use num_complex::Complex64;

/// Pfaffian of an antisymmetric complex matrix.
///
/// Parlett-Reid reduction `P A P^T = L T L^T` to antisymmetric tridiagonal
/// form with partial pivoting; the Pfaffian is the product of the
/// super-diagonal entries `T[2k, 2k+1]` times the sign of the permutation.
pub fn pfaffian_complex(a: &DMatrix<Complex64>) -> Complex64 {
    assert_eq!(a.nrows(), a.ncols(), "pfaffian of a non-square matrix");
    let n = a.nrows();
    if n % 2 == 1 {
        return Complex64::new(0.0, 0.0);
    }
    let mut a = a.clone();
    let mut pf = Complex64::new(1.0, 0.0);
    for k in (0..n.saturating_sub(1)).step_by(2) {
        let kp = (k + 1..n)
            .max_by(|&i, &j| a[(i, k)].norm().total_cmp(&a[(j, k)].norm()))
            .expect("non-empty pivot column");
        if kp != k + 1 {
            a.swap_rows(k + 1, kp);
            a.swap_columns(k + 1, kp);
            pf = -pf;
        }
        let pivot = a[(k, k + 1)];
        if pivot == Complex64::new(0.0, 0.0) {
            return Complex64::new(0.0, 0.0);
        }
        pf *= pivot;
        if k + 2 < n {
            let tau: Vec<Complex64> = (k + 2..n).map(|j| a[(k, j)] / pivot).collect();
            let col: Vec<Complex64> = (k + 2..n).map(|i| a[(i, k + 1)]).collect();
            for (ii, i) in (k + 2..n).enumerate() {
                for (jj, j) in (k + 2..n).enumerate() {
                    a[(i, j)] += tau[ii] * col[jj] - col[ii] * tau[jj];
                }
            }
        }
    }
    pf
}

/// Pfaffian of a real antisymmetric matrix.
pub fn pfaffian(a: &DMatrix<f64>) -> f64 {
    pfaffian_complex(&a.map(|v| Complex64::new(v, 0.0))).re
}
