//! Geometry of the boundary manifold: the unit-sphere bundle inside the
//! compact quotient, diffeomorphic to a sphere times a torus.
//!
//! Points are pairs `(x, z̄)` with `x` a unit vector in v and `z̄` taken
//! modulo the lattice. The scalar curvature at such a point is computed by
//! two independent routes — the Ricci formula
//! `scal = scal~ + (m−1)(m−2) − Ric(x,x)` and a direct evaluation of the
//! second-fundamental-form expansion — and the two must agree. Horizontal
//! geodesic lifts over great circles pick up a torus displacement of
//! `π[x,y]` per loop, the holonomy invariant used to tell fibered isometries
//! apart.

use crate::equiv::LatticeBasis;
use crate::linalg::{self, Matrix, Tolerances};
use crate::nilalg::{
    bracket, connection_closed_form, exp_pushforward, ricci_form, scal_ambient, GroupPoint,
    SkewPencil,
};
use crate::{Error, Result};

/// A point of the boundary manifold: unit `x` in v, `z̄` reduced to the
/// half-open fundamental parallelepiped of the lattice.
#[derive(Debug, Clone)]
pub struct BoundaryPoint {
    x: Vec<f64>,
    zbar: Vec<f64>,
}

impl BoundaryPoint {
    pub fn new(x: Vec<f64>, z: &[f64], lattice: &LatticeBasis) -> Result<Self> {
        let n = linalg::norm(&x);
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "boundary point needs a unit vector, got norm {n}"
            )));
        }
        let zbar = lattice.reduce(z)?;
        Ok(BoundaryPoint { x, zbar })
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn zbar(&self) -> &[f64] {
        &self.zbar
    }
}

/// Left-invariant frame at a boundary point: outward normal plus an
/// orthonormal tangent basis.
#[derive(Debug, Clone)]
pub struct BoundaryFrame {
    pub normal: Vec<f64>,
    pub tangent: Vec<Vec<f64>>,
}

fn check_point(p: &SkewPencil, pt: &BoundaryPoint) -> Result<()> {
    if pt.x.len() != p.m() || pt.zbar.len() != p.k() {
        return Err(Error::Shape("point dimensions do not match pencil".into()));
    }
    Ok(())
}

/// Orthonormal completion of a unit vector: a Householder reflection carrying
/// the first coordinate vector to `x`; its remaining columns span `x⊥`.
fn householder_completion(x: &[f64]) -> Matrix {
    let m = x.len();
    let mut u: Vec<f64> = x.to_vec();
    u[0] -= 1.0;
    let d = linalg::norm(&u);
    if d < 1e-14 {
        return Matrix::identity(m);
    }
    let u: Vec<f64> = u.iter().map(|v| v / d).collect();
    Matrix::from_fn(m, m, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        id - 2.0 * u[i] * u[j]
    })
}

/// In the left-invariant frame the outward normal is `(x, 0)` and the
/// tangent space is `x⊥ ⊂ v ⊕ z`: the orthogonal complement of `x` in v,
/// followed by all of z. Independent of `z̄`.
pub fn boundary_frame(p: &SkewPencil, pt: &BoundaryPoint) -> Result<BoundaryFrame> {
    check_point(p, pt)?;
    let (m, k, n) = (p.m(), p.k(), p.dim());
    let mut normal = vec![0.0; n];
    normal[..m].copy_from_slice(&pt.x);

    let h = householder_completion(&pt.x);
    let mut tangent = Vec::with_capacity(n - 1);
    for j in 1..m {
        let mut t = vec![0.0; n];
        t[..m].copy_from_slice(&h.col(j));
        tangent.push(t);
    }
    for i in 0..k {
        let mut t = vec![0.0; n];
        t[m + i] = 1.0;
        tangent.push(t);
    }
    Ok(BoundaryFrame { normal, tangent })
}

/// Scalar curvature at a boundary point via the Ricci route:
/// `scal~ + (m−1)(m−2) − Ric(x,x)`. Depends on the point only through `x`.
pub fn scal_at(p: &SkewPencil, pt: &BoundaryPoint) -> Result<f64> {
    check_point(p, pt)?;
    let m = p.m() as f64;
    let ric_xx = ricci_form(p).eval_v(&pt.x);
    Ok(scal_ambient(p) + (m - 1.0) * (m - 2.0) - ric_xx)
}

/// Scalar curvature by both routes, with the shared ingredients.
#[derive(Debug, Clone)]
pub struct ScalReport {
    /// Ricci-formula value `scal~ + (m−1)(m−2) − Ric(x,x)`.
    pub scal_ricci: f64,
    /// Second-fundamental-form value
    /// `scal~ − 2·Ric(ν,ν) + trace(S)² − ‖S‖²_F`.
    pub scal_shape: f64,
    /// Ambient scalar curvature.
    pub ambient: f64,
    /// `Ric(x, x)`.
    pub ric_xx: f64,
}

/// The matrix of `∇x` (covariant derivative of the left-invariant extension
/// of `x`) in the full basis: v-columns map to `½[e_b, x] ∈ z`, z-columns to
/// `−½ j(z_i) x ∈ v`.
fn nabla_x_matrix(p: &SkewPencil, x: &[f64]) -> Matrix {
    let (m, n) = (p.m(), p.dim());
    let mut dx = Matrix::zeros(n, n);
    for (i, ji) in p.generators().iter().enumerate() {
        let jx = ji.mul_vec(x);
        for (b, &v) in jx.iter().enumerate() {
            // ⟨½[e_b, x], z_i⟩ = ½⟨Jᵢ e_b, x⟩ = −½ (Jᵢ x)[b]
            dx.set(m + i, b, -0.5 * v);
            dx.set(b, m + i, -0.5 * v);
        }
    }
    dx
}

/// Evaluates the second-fundamental-form expansion of the boundary scalar
/// curvature directly: builds the shape operator `u ↦ proj_v u + ∇_u x` on
/// the tangent frame and combines its trace and Frobenius norm with the
/// ambient quantities. Checks `trace(∇x) = 0` and `trace(S) = m−1` on the
/// way. Must agree with [`scal_at`].
pub fn scal_via_shape(p: &SkewPencil, pt: &BoundaryPoint) -> Result<ScalReport> {
    check_point(p, pt)?;
    let m = p.m();
    let frame = boundary_frame(p, pt)?;
    let dx = nabla_x_matrix(p, &pt.x);

    let trace_dx = dx.trace();
    if trace_dx.abs() > 1e-10 * Tolerances::scale_of(&dx) {
        return Err(Error::Numerical(format!(
            "trace(∇x) = {trace_dx}, expected 0"
        )));
    }

    let nt = frame.tangent.len();
    let mut shape = Matrix::zeros(nt, nt);
    for (s, ts) in frame.tangent.iter().enumerate() {
        // S(t) = (t_v, 0) + ∇_t x
        let mut image = dx.mul_vec(ts);
        for i in 0..m {
            image[i] += ts[i];
        }
        for (r, tr) in frame.tangent.iter().enumerate() {
            shape.set(r, s, linalg::dot(tr, &image));
        }
    }
    let trace_s = shape.trace();
    let expected = (m - 1) as f64;
    if (trace_s - expected).abs() > 1e-9 * expected.max(1.0) {
        return Err(Error::Numerical(format!(
            "trace of the shape operator is {trace_s}, expected {expected}"
        )));
    }

    let ambient = scal_ambient(p);
    let ric_xx = ricci_form(p).eval_v(&pt.x);
    let mf = m as f64;
    let scal_ricci = ambient + (mf - 1.0) * (mf - 2.0) - ric_xx;
    let scal_shape =
        ambient - 2.0 * ric_xx + trace_s * trace_s - shape.frobenius_norm().powi(2);
    Ok(ScalReport {
        scal_ricci,
        scal_shape,
        ambient,
        ric_xx,
    })
}

/// Extremes of the boundary scalar curvature and the unit directions
/// attaining them.
#[derive(Debug, Clone)]
pub struct ScalExtremes {
    pub min: f64,
    pub max: f64,
    pub argmin_x: Vec<f64>,
    pub argmax_x: Vec<f64>,
}

fn sign_fixed(mut v: Vec<f64>) -> Vec<f64> {
    if let Some(first) = v.iter().find(|c| c.abs() > 1e-12) {
        if *first < 0.0 {
            for c in &mut v {
                *c = -*c;
            }
        }
    }
    v
}

/// The maximum of the scalar curvature corresponds to the minimum eigenvalue
/// of the Ricci form on v (and vice versa), attained at the matching unit
/// eigenvectors. Eigenvector signs are fixed by making the first nonzero
/// component positive.
pub fn scal_extremes(p: &SkewPencil) -> Result<ScalExtremes> {
    let m = p.m() as f64;
    let vb = ricci_form(p).v_block();
    let (evals, vecs) = linalg::sym_eigen(&vb)?;
    let base = scal_ambient(p) + (m - 1.0) * (m - 2.0);
    let last = evals.len() - 1;
    Ok(ScalExtremes {
        min: base - evals[last],
        max: base - evals[0],
        argmin_x: sign_fixed(vecs.col(last)),
        argmax_x: sign_fixed(vecs.col(0)),
    })
}

fn check_orthonormal_pair(x: &[f64], y: &[f64]) -> Result<()> {
    let tol = 1e-10;
    if (linalg::norm(x) - 1.0).abs() > tol
        || (linalg::norm(y) - 1.0).abs() > tol
        || linalg::dot(x, y).abs() > tol
    {
        return Err(Error::InvalidInput(
            "expected an orthonormal pair of v-vectors".into(),
        ));
    }
    Ok(())
}

/// Horizontal geodesic lift of the great circle through orthonormal `x`, `y`:
/// `σ(t) = ((cos t)x + (sin t)y, z(t))` with `z(t) = z₀ + t[x,y]/2`.
///
/// The initial `z₀` is reduced modulo the lattice; the moving z-coordinate is
/// left raw so that fiber displacements stay visible even when they wrap.
pub fn horizontal_lift(
    p: &SkewPencil,
    lattice: &LatticeBasis,
    x: &[f64],
    y: &[f64],
    z0: &[f64],
    t: f64,
) -> Result<GroupPoint> {
    if x.len() != p.m() || y.len() != p.m() {
        return Err(Error::Shape("lift directions must lie in v".into()));
    }
    if lattice.k() != p.k() {
        return Err(Error::Shape("lattice dimension does not match pencil".into()));
    }
    check_orthonormal_pair(x, y)?;
    let zr = lattice.reduce(z0)?;
    let (c, s) = (t.cos(), t.sin());
    let xv: Vec<f64> = x.iter().zip(y).map(|(a, b)| c * a + s * b).collect();
    let br = bracket(p, x, y)?;
    let z: Vec<f64> = zr.iter().zip(&br).map(|(z, b)| z + 0.5 * t * b).collect();
    Ok(GroupPoint::new(xv, z))
}

/// Fiber displacement of the horizontal lift after one full loop:
/// `σ(2π) − σ(0) = π[x, y]`. The loop closes exactly when x and y commute.
pub fn holonomy_displacement(p: &SkewPencil, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    if x.len() != p.m() || y.len() != p.m() {
        return Err(Error::Shape("directions must lie in v".into()));
    }
    check_orthonormal_pair(x, y)?;
    let br = bracket(p, x, y)?;
    Ok(br.iter().map(|b| std::f64::consts::PI * b).collect())
}

/// Submersion and fiber diagnostics.
#[derive(Debug, Clone)]
pub struct FiberReport {
    /// Largest connection coefficient with both lower indices in z; zero
    /// means the fibers are totally geodesic (and flat).
    pub vertical_connection_violation: f64,
    /// Largest defect of "projection to v kills z and is isometric on v",
    /// checked through the exponential differential at sample points.
    pub projection_violation: f64,
}

impl FiberReport {
    pub fn max_violation(&self) -> f64 {
        f64::max(
            self.vertical_connection_violation,
            self.projection_violation,
        )
    }
}

/// Verifies the submersion structure: `∇_w w′ = 0` for all central basis
/// pairs, and the coordinate projection to v acts as the identity on
/// v-components of left-invariant frames pushed through the exponential
/// differential.
pub fn fiber_geometry_check(p: &SkewPencil) -> FiberReport {
    let (m, k, n) = (p.m(), p.k(), p.dim());
    let gamma = connection_closed_form(p);
    let mut vertical = 0.0f64;
    for i in 0..k {
        for j in 0..k {
            for c in 0..n {
                vertical = vertical.max(gamma.get(m + i, m + j, c).abs());
            }
        }
    }

    // sample base points: origin, coordinate directions, and a mixed vector
    let mut samples: Vec<Vec<f64>> = vec![vec![0.0; n]];
    for i in 0..n {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        samples.push(v);
    }
    samples.push((0..n).map(|i| 0.3 + 0.1 * i as f64).collect());

    let mut projection = 0.0f64;
    for v in &samples {
        let push = exp_pushforward(p, v).expect("dimension checked");
        for b in 0..n {
            let mut frame = vec![0.0; n];
            frame[b] = 1.0;
            // coordinate velocity whose exponential pushforward is the frame
            // vector: (Id − ½ ad_v) c = u
            let coord = push.solve(&frame).expect("unitriangular system");
            for i in 0..m {
                projection = projection.max((coord[i] - frame[i]).abs());
            }
        }
    }
    FiberReport {
        vertical_connection_violation: vertical,
        projection_violation: projection,
    }
}
