//! Flat hypercomplex structures on `R^{4n} = C^{2n} = H^n`.
//!
//! Conventions, fixed here and used by every other module:
//!
//! * A quaternionic vector `q` has components `q_a = z_{2a} + z_{2a+1} j` with
//!   complex coordinates `z_c = x_{2c} + i x_{2c+1}`, so the real coordinates
//!   of `q_a` are its `1, i, j, k` coefficients `x_{4a..4a+4}`.
//! * `I`, `J`, `K` act by left multiplication with `i`, `j`, `k`. Hence the
//!   matrix product `I J K` equals `-Id` and `I` is multiplication by `i` on
//!   the complex coordinates.
//! * `J` is antilinear in complex coordinates: `z(Jx) = S conj(z(x))` where
//!   `S` is block-diagonal with blocks `[[0, -1], [1, 0]]`.
//! * A real `(1,1)`-form is stored as the hermitian matrix `A` of
//!   `i sum A_ab dz_a ^ dzbar_b`; `omega_I` is the identity. Top wedge powers
//!   are then `alpha_A^{2n} = det(A) omega_I^{2n}`.
//! * A `(2,0)`-form is stored as the antisymmetric matrix `W` of
//!   `sum_{a<b} W_ab dz_a ^ dz_b`. The hyperhermitian form of `hbar` is
//!   `Omega = hbar(J., .)`, i.e. `W = S^T A`.

mod exterior;
mod forms;
mod frame;
mod pfaffian;

pub use exterior::ExteriorForm;
pub use forms::{decompose, real_gram, recompose, HermitianForm, HyperhermitianForm};
pub use frame::{standard_frame, FrameDefects, HypercomplexFrame};
pub use pfaffian::{pfaffian, pfaffian_complex};

/// `c(n)` with `Omega^n ^ conj(Omega^n) = c(n) omega_I^{2n}` for the standard
/// hyperhermitian form, evaluated by expanding the wedge products.
pub fn volume_constant(n: usize) -> crate::Result<f64> {
    let frame = standard_frame(n)?;
    let omega = HyperhermitianForm::standard(&frame);
    Ok(exterior::volume_ratio(&omega.coefficients(), &frame).re)
}

/// `Omega^n ^ conj(Omega^n) / omega_I^{2n}` for an arbitrary `(2,0)` coefficient matrix.
pub fn wedge_volume_ratio(w: &nalgebra::DMatrix<num_complex::Complex64>, frame: &HypercomplexFrame) -> num_complex::Complex64 {
    exterior::volume_ratio(w, frame)
}
