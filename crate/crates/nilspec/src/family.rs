//! The explicit one-parameter deformation family of skew pencils on
//! `R⁶ ⊕ R²`, and the dimension bound for large isospectral families.
//!
//! The family is parametrized by a block-rotation triple `a = (a₁,a₂,a₃)`
//! with `0 < a₁ < a₂ < a₃` and a coupling triple `b = (b₁₂,b₁₃,b₂₃)`. The
//! deformation `u ↦ b(u)` moves squared couplings linearly at rates fixed by
//! the differences of the `aᵢ²`, which keeps the pencil isospectral while
//! changing its Ricci spectrum.

use serde::Deserialize;

use crate::linalg::Matrix;
use crate::nilalg::SkewPencil;
use crate::{Error, Result};

/// Parameters of the deformation family: the rotation triple `a` and the
/// coupling triple `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyParams {
    a: [f64; 3],
    b: [f64; 3],
}

/// The parameter interval of the deformation through a given `b`; always
/// contains 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeformationInterval {
    pub lo: f64,
    pub hi: f64,
}

impl DeformationInterval {
    /// Half-width tolerance used for endpoint membership.
    fn eps(&self) -> f64 {
        1e-12 * f64::max(1.0, f64::max(self.lo.abs(), self.hi.abs()))
    }

    pub fn contains(&self, u: f64) -> bool {
        u >= self.lo - self.eps() && u <= self.hi + self.eps()
    }

    pub fn has_interior(&self) -> bool {
        self.lo < self.hi
    }

    /// `n` equally spaced samples including both endpoints (`n ≥ 2`).
    pub fn grid(&self, n: usize) -> Vec<f64> {
        assert!(n >= 2, "grid needs at least two samples");
        (0..n)
            .map(|i| self.lo + (self.hi - self.lo) * i as f64 / (n - 1) as f64)
            .collect()
    }
}

fn check_ordering(a: &[f64; 3]) -> Result<()> {
    if 0.0 < a[0] && a[0] < a[1] && a[1] < a[2] {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "rotation triple must satisfy 0 < a1 < a2 < a3, got {a:?}"
        )))
    }
}

/// The 6×6 block-diagonal skew matrix with 2×2 rotation generators of
/// speeds `a₁, a₂, a₃`.
pub fn build_a(a: &[f64; 3]) -> Result<Matrix> {
    check_ordering(a)?;
    let mut m = Matrix::zeros(6, 6);
    for (i, &ai) in a.iter().enumerate() {
        m.set(2 * i, 2 * i + 1, -ai);
        m.set(2 * i + 1, 2 * i, ai);
    }
    Ok(m)
}

/// The 6×6 skew matrix coupling the odd basis directions:
/// `b₁₂` at (1,3), `b₁₃` at (1,5), `b₂₃` at (3,5) (1-indexed); the even
/// rows and columns are zero.
pub fn build_b(b: &[f64; 3]) -> Matrix {
    let mut m = Matrix::zeros(6, 6);
    let entries = [(0, 2, b[0]), (0, 4, b[1]), (2, 4, b[2])];
    for (i, j, v) in entries {
        m.set(i, j, v);
        m.set(j, i, -v);
    }
    m
}

impl FamilyParams {
    pub fn new(a: [f64; 3], b: [f64; 3]) -> Result<Self> {
        check_ordering(&a)?;
        Ok(FamilyParams { a, b })
    }

    pub fn a(&self) -> [f64; 3] {
        self.a
    }

    pub fn b(&self) -> [f64; 3] {
        self.b
    }

    /// The two-generator pencil `j(s,t) = s·A + t·B` on `R⁶ ⊕ R²`.
    pub fn pencil(&self) -> SkewPencil {
        let a = build_a(&self.a).expect("ordering checked at construction");
        let b = build_b(&self.b);
        SkewPencil::new(6, 2, vec![a, b]).expect("skew by construction")
    }

    /// Deformation parameter interval
    /// `[max(−b₁₂²/(a₂²−a₁²), −b₂₃²/(a₃²−a₂²)), b₁₃²/(a₃²−a₁²)]`.
    pub fn interval(&self) -> DeformationInterval {
        let [a1, a2, a3] = self.a.map(|x| x * x);
        let [b12, b13, b23] = self.b.map(|x| x * x);
        let lo = f64::max(-b12 / (a2 - a1), -b23 / (a3 - a2));
        let hi = b13 / (a3 - a1);
        DeformationInterval { lo, hi }
    }

    /// The deformed parameters at `u`: each squared coupling moves linearly,
    /// `b₁₂(u)² = b₁₂² + u(a₂²−a₁²)`, `b₁₃(u)² = b₁₃² + u(a₁²−a₃²)`,
    /// `b₂₃(u)² = b₂₃² + u(a₃²−a₂²)`, with signs matching `b` (sign(0) = +1).
    pub fn deform(&self, u: f64) -> Result<FamilyParams> {
        let interval = self.interval();
        if !interval.contains(u) {
            return Err(Error::Domain(format!(
                "u = {u} lies outside the deformation interval [{}, {}]",
                interval.lo, interval.hi
            )));
        }
        let [a1, a2, a3] = self.a.map(|x| x * x);
        let rates = [a2 - a1, a1 - a3, a3 - a2];
        let mut out = [0.0; 3];
        for i in 0..3 {
            let radicand = self.b[i] * self.b[i] + u * rates[i];
            let clamp = 1e-12 * f64::max(1.0, self.b[i] * self.b[i] + u.abs() * rates[i].abs());
            let radicand = if radicand < 0.0 && radicand >= -clamp {
                0.0
            } else {
                radicand
            };
            if radicand < 0.0 {
                return Err(Error::Domain(format!(
                    "negative radicand {radicand} for coupling {i} at u = {u}"
                )));
            }
            let sign = if self.b[i] < 0.0 { -1.0 } else { 1.0 };
            out[i] = sign * radicand.sqrt();
        }
        FamilyParams::new(self.a, out)
    }

    /// Closed-form Ricci restriction to `v ⊗ v` along the deformation:
    /// `½(A² + B(u)²)` as a symmetric 6×6 matrix.
    pub fn ricci_u(&self, u: f64) -> Result<Matrix> {
        let deformed = self.deform(u)?;
        let a = build_a(&self.a)?;
        let b = build_b(&deformed.b);
        Ok(a.mul(&a).add(&b.mul(&b)).scale(0.5))
    }

    /// Parses `{"a":[a1,a2,a3],"b":[b12,b13,b23]}`.
    pub fn from_json_str(s: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct FamilyJson {
            a: [f64; 3],
            b: [f64; 3],
        }
        let raw: FamilyJson =
            serde_json::from_str(s).map_err(|e| Error::Parse(format!("family JSON: {e}")))?;
        FamilyParams::new(raw.a, raw.b)
    }
}

/// Lower bound `m(m−1)/2 − ⌊m/2⌋(⌊m/2⌋+2)` for the dimension of generic
/// isospectral families of pencils on `Rᵐ ⊕ R²`.
pub fn dimension_bound(m: u64) -> Result<i64> {
    if m == 0 {
        return Err(Error::InvalidInput("dimension must be at least 1".into()));
    }
    let m = m as i64;
    let half = m / 2;
    Ok(m * (m - 1) / 2 - half * (half + 2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::char_poly;

    fn reference() -> FamilyParams {
        FamilyParams::new([1.0, 2.0, 3.0], [0.0, 1.0, 0.0]).unwrap()
    }

    #[test]
    fn build_a_reference() {
        let a = build_a(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(a.get(1, 0), 1.0);
        assert_eq!(a.get(0, 1), -1.0);
        assert_eq!(a.get(3, 2), 2.0);
        assert_eq!(a.get(5, 4), 3.0);
        assert_eq!(a.skew_violation(), 0.0);

        // char poly (λ²+1)(λ²+4)(λ²+9)
        let p = char_poly(&a).unwrap();
        let expect = [1.0, 0.0, 14.0, 0.0, 49.0, 0.0, 36.0];
        for (got, want) in p.coeffs().iter().zip(expect) {
            assert!((got - want).abs() < 1e-10);
        }

        // −a² = diag(1,1,4,4,9,9)
        let minus_a2 = a.mul(&a).scale(-1.0);
        let expect = Matrix::diag(&[1.0, 1.0, 4.0, 4.0, 9.0, 9.0]);
        assert!(minus_a2.sub(&expect).max_abs() < 1e-14);

        assert!(build_a(&[2.0, 1.0, 3.0]).is_err());
        assert!(build_a(&[0.0, 1.0, 2.0]).is_err());
    }

    #[test]
    fn build_b_reference() {
        let b = build_b(&[0.0, 1.0, 0.0]);
        assert_eq!(b.get(0, 4), 1.0);
        assert_eq!(b.get(4, 0), -1.0);
        let mut nonzeros = 0;
        for i in 0..6 {
            for j in 0..6 {
                if b.get(i, j) != 0.0 {
                    nonzeros += 1;
                }
            }
        }
        assert_eq!(nonzeros, 2);
        assert_eq!(build_b(&[0.0, 0.0, 0.0]), Matrix::zeros(6, 6));
        assert_eq!(build_b(&[0.3, -1.2, 0.7]).skew_violation(), 0.0);
    }

    #[test]
    fn interval_reference_values() {
        let i = reference().interval();
        assert_eq!((i.lo, i.hi), (0.0, 0.125));
        assert!(i.has_interior());

        let degenerate = FamilyParams::new([1.0, 2.0, 3.0], [0.0, 0.0, 0.0]).unwrap();
        let i = degenerate.interval();
        assert_eq!((i.lo, i.hi), (0.0, 0.0));
        assert!(!i.has_interior());

        let mixed = FamilyParams::new([1.0, 2.0, 3.0], [1.0, 1.0, 1.0]).unwrap();
        let i = mixed.interval();
        assert!((i.lo + 0.2).abs() < 1e-15);
        assert!((i.hi - 0.125).abs() < 1e-15);
    }

    #[test]
    fn deform_reference_values() {
        let p = reference();
        let d = p.deform(1.0 / 16.0).unwrap();
        let expect = [(3.0f64 / 16.0).sqrt(), 0.5f64.sqrt(), (5.0f64 / 16.0).sqrt()];
        for (got, want) in d.b.iter().zip(expect) {
            assert!((got - want).abs() < 1e-15);
        }

        assert_eq!(p.deform(0.0).unwrap().b, p.b);

        let d = p.deform(0.125).unwrap();
        assert!((d.b[0] - 0.375f64.sqrt()).abs() < 1e-15);
        assert_eq!(d.b[1], 0.0);
        assert!((d.b[2] - 0.625f64.sqrt()).abs() < 1e-15);

        assert!(p.deform(0.2).is_err());
        assert!(p.deform(-0.01).is_err());
    }

    #[test]
    fn deform_keeps_signs() {
        let p = FamilyParams::new([1.0, 2.0, 3.0], [-0.5, 1.0, 0.25]).unwrap();
        let d = p.deform(0.01).unwrap();
        assert!(d.b[0] < 0.0 && d.b[1] > 0.0 && d.b[2] > 0.0);
    }

    #[test]
    fn ricci_u_reference_matrix() {
        let p = reference();
        let r0 = p.ricci_u(0.0).unwrap();
        let expect = Matrix::diag(&[-1.0, -0.5, -2.0, -2.0, -5.0, -4.5]);
        assert!(r0.sub(&expect).max_abs() < 1e-14);

        // at the right endpoint the (1,3) and (3,5) couplings vanish
        let r = p.ricci_u(0.125).unwrap();
        assert!(r.get(0, 2).abs() < 1e-15);
        assert!(r.get(2, 4).abs() < 1e-15);
        assert!((r.get(0, 4) - 15.0f64.sqrt() / 16.0).abs() < 1e-15);

        // interior value against the displayed closed form
        let u = 1.0 / 16.0;
        let r = p.ricci_u(u).unwrap();
        assert!((r.get(0, 0) + 0.5 * (2.0 - 5.0 * u)).abs() < 1e-15);
        assert!((r.get(0, 2) + 0.5 * (5.0 * u - 40.0 * u * u).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn ricci_u_matches_pencil_ricci() {
        let p = reference();
        for u in p.interval().grid(65) {
            let closed = p.ricci_u(u).unwrap();
            let pencil = p.deform(u).unwrap().pencil();
            let vblock = crate::nilalg::ricci_form(&pencil).v_block();
            let diff = closed.sub(&vblock).max_abs();
            assert!(diff <= 1e-12, "u={u}: {diff}");
        }
    }

    #[test]
    fn dimension_bound_values() {
        assert_eq!(dimension_bound(6).unwrap(), 0);
        assert_eq!(dimension_bound(5).unwrap(), 2);
        assert_eq!(dimension_bound(7).unwrap(), 6);
        assert_eq!(dimension_bound(8).unwrap(), 4);
        assert!(dimension_bound(0).is_err());
    }

    #[test]
    fn family_json() {
        let p = FamilyParams::from_json_str(r#"{"a":[1,2,3],"b":[0,1,0]}"#).unwrap();
        assert_eq!(p, reference());
        assert!(FamilyParams::from_json_str(r#"{"a":[3,2,1],"b":[0,1,0]}"#).is_err());
    }
}
