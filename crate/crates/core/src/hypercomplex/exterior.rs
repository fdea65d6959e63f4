//! Minimal exterior algebra on `dz_0..dz_{m-1}, dzbar_0..dzbar_{m-1}`.
//!
//! Used only for small dimensions, to evaluate top-degree wedge products
//! directly instead of through determinant identities.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::frame::HypercomplexFrame;

/// A complex differential form with constant coefficients; monomials are
/// bitmasks over the generators `dz_c` (bit `c`) and `dzbar_c` (bit `m + c`).
#[derive(Clone, Debug, Default)]
pub struct ExteriorForm {
    m: usize,
    terms: BTreeMap<u64, Complex64>,
}

fn swap_sign(a: u64, b: u64) -> f64 {
    // moving each generator of `b` left past the larger generators of `a`
    let mut inversions = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        inversions += (a >> (j + 1)).count_ones();
        rest &= rest - 1;
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

impl ExteriorForm {
    pub fn zero(m: usize) -> Self {
        assert!(2 * m <= 64, "too many generators");
        Self {
            m,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(m: usize) -> Self {
        let mut f = Self::zero(m);
        f.terms.insert(0, Complex64::new(1.0, 0.0));
        f
    }

    fn add_term(&mut self, mask: u64, c: Complex64) {
        if c == Complex64::new(0.0, 0.0) {
            return;
        }
        *self.terms.entry(mask).or_default() += c;
    }

    fn pair(&self, first: usize, second: usize, c: Complex64) -> (u64, Complex64) {
        debug_assert!(first != second);
        let mask = (1u64 << first) | (1u64 << second);
        let sign = if first < second { 1.0 } else { -1.0 };
        (mask, c * sign)
    }

    /// `sum_{a<b} W_ab dz_a ^ dz_b` for antisymmetric `W`.
    pub fn holomorphic_two_form(w: &DMatrix<Complex64>) -> Self {
        let m = w.nrows();
        let mut f = Self::zero(m);
        for a in 0..m {
            for b in a + 1..m {
                let (mask, c) = f.pair(a, b, w[(a, b)]);
                f.add_term(mask, c);
            }
        }
        f
    }

    /// `i sum A_ab dz_a ^ dzbar_b`.
    pub fn hermitian_two_form(a: &DMatrix<Complex64>) -> Self {
        let m = a.nrows();
        let mut f = Self::zero(m);
        for r in 0..m {
            for c in 0..m {
                let (mask, v) = f.pair(r, m + c, Complex64::i() * a[(r, c)]);
                f.add_term(mask, v);
            }
        }
        f
    }

    pub fn wedge(&self, other: &ExteriorForm) -> ExteriorForm {
        assert_eq!(self.m, other.m);
        let mut out = Self::zero(self.m);
        for (&ma, &ca) in &self.terms {
            for (&mb, &cb) in &other.terms {
                if ma & mb == 0 {
                    out.add_term(ma | mb, ca * cb * swap_sign(ma, mb));
                }
            }
        }
        out
    }

    pub fn pow(&self, k: usize) -> ExteriorForm {
        (0..k).fold(Self::one(self.m), |acc, _| acc.wedge(self))
    }

    /// Complex conjugate: swaps `dz_c <-> dzbar_c` and conjugates coefficients.
    pub fn conj(&self) -> ExteriorForm {
        let m = self.m;
        let mut out = Self::zero(m);
        for (&mask, &c) in &self.terms {
            // generators in increasing order, mapped, then re-sorted with sign
            let mut gens: Vec<usize> = (0..2 * m)
                .filter(|&g| mask >> g & 1 == 1)
                .map(|g| if g < m { g + m } else { g - m })
                .collect();
            let mut sign = 1.0;
            for i in 0..gens.len() {
                for j in 0..gens.len() - 1 - i {
                    if gens[j] > gens[j + 1] {
                        gens.swap(j, j + 1);
                        sign = -sign;
                    }
                }
            }
            let new_mask = gens.iter().fold(0u64, |acc, &g| acc | 1 << g);
            out.add_term(new_mask, c.conj() * sign);
        }
        out
    }

    /// Coefficient of `dz_0 ^ ... ^ dz_{m-1} ^ dzbar_0 ^ ... ^ dzbar_{m-1}`.
    pub fn top_coefficient(&self) -> Complex64 {
        let top = if 2 * self.m == 64 { u64::MAX } else { (1u64 << (2 * self.m)) - 1 };
        self.terms.get(&top).copied().unwrap_or_default()
    }
}

/// `Omega^n ^ conj(Omega^n) / omega_I^{2n}` for `Omega` with coefficients `w`.
pub(crate) fn volume_ratio(w: &DMatrix<Complex64>, frame: &HypercomplexFrame) -> Complex64 {
    let n = frame.n();
    let m = frame.complex_dim();
    let omega_n = ExteriorForm::holomorphic_two_form(w).pow(n);
    let lhs = omega_n.wedge(&omega_n.conj());
    let omega_i = ExteriorForm::hermitian_two_form(&DMatrix::identity(m, m)).pow(m);
    lhs.top_coefficient() / omega_i.top_coefficient()
}
