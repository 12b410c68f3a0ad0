//! Two-step nilpotent metric Lie algebras built from skew-symmetric pencils.
//!
//! A pencil of skew maps `j(z) = Σ zᵢ Jᵢ` on `v = Rᵐ` (with `z = Rᵏ` central)
//! defines the bracket `⟨[x,y], z⟩ = ⟨j(z)x, y⟩` on `g = v ⊕ z`. This module
//! carries the algebra and the left-invariant geometry of the associated
//! simply connected group: group law in exponential coordinates, Levi-Civita
//! connection (a closed form and an independent Koszul evaluation), full
//! curvature tensor, Ricci form, and ambient scalar curvature.
//!
//! Basis convention everywhere: the orthonormal basis `e₁…e_m` of `v`
//! followed by `z₁…z_k` of `z`, in that fixed order.

use rand::Rng;
use serde::Deserialize;

use crate::linalg::{self, Matrix, RationalMatrix, Tolerances};
use crate::{Error, Result};

/// A pencil of `k` skew-symmetric `m×m` matrices; evaluation is linear in z.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewPencil {
    m: usize,
    k: usize,
    j: Vec<Matrix>,
}

impl SkewPencil {
    pub fn new(m: usize, k: usize, j: Vec<Matrix>) -> Result<Self> {
        if m == 0 || k == 0 {
            return Err(Error::Shape("pencil dimensions must be positive".into()));
        }
        if j.len() != k {
            return Err(Error::Shape(format!(
                "expected {k} generator matrices, got {}",
                j.len()
            )));
        }
        let tols = Tolerances::default();
        for (i, mat) in j.iter().enumerate() {
            if mat.rows() != m || mat.cols() != m {
                return Err(Error::Shape(format!(
                    "generator {i} is {}x{}, expected {m}x{m}",
                    mat.rows(),
                    mat.cols()
                )));
            }
            mat.check_skew_symmetric(&tols).map_err(|e| {
                Error::InvalidInput(format!("generator {i} is not skew-symmetric: {e}"))
            })?;
        }
        Ok(SkewPencil { m, k, j })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Total dimension m + k of the metric Lie algebra.
    pub fn dim(&self) -> usize {
        self.m + self.k
    }

    pub fn generators(&self) -> &[Matrix] {
        &self.j
    }

    /// Evaluates the pencil: `j(z) = Σ zᵢ Jᵢ`.
    pub fn eval(&self, z: &[f64]) -> Result<Matrix> {
        if z.len() != self.k {
            return Err(Error::Shape(format!(
                "z has length {}, expected {}",
                z.len(),
                self.k
            )));
        }
        let mut out = Matrix::zeros(self.m, self.m);
        for (zi, ji) in z.iter().zip(&self.j) {
            if *zi != 0.0 {
                out = out.add(&ji.scale(*zi));
            }
        }
        Ok(out)
    }

    /// Conjugated pencil with generators `A Jᵢ Aᵀ`.
    pub fn conjugate(&self, a: &Matrix) -> Result<SkewPencil> {
        if a.rows() != self.m || a.cols() != self.m {
            return Err(Error::Shape("conjugator has wrong dimensions".into()));
        }
        let at = a.transpose();
        let gens = self.j.iter().map(|ji| a.mul(ji).mul(&at)).collect();
        SkewPencil::new(self.m, self.k, gens)
    }
}

/// Seeded random pencil, for property suites: entries uniform in [-1, 1],
/// skew-symmetrized.
pub fn random_pencil(m: usize, k: usize, rng: &mut impl Rng) -> SkewPencil {
    let gens = (0..k)
        .map(|_| {
            let g = Matrix::from_fn(m, m, |_, _| rng.gen_range(-1.0..1.0));
            g.sub(&g.transpose()).scale(0.5)
        })
        .collect();
    SkewPencil::new(m, k, gens).expect("skew by construction")
}

/// Group element in exponential coordinates: `exp(x + z) ↦ (x, z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupPoint {
    pub x: Vec<f64>,
    pub z: Vec<f64>,
}

impl GroupPoint {
    pub fn new(x: Vec<f64>, z: Vec<f64>) -> Self {
        GroupPoint { x, z }
    }

    pub fn identity(m: usize, k: usize) -> Self {
        GroupPoint {
            x: vec![0.0; m],
            z: vec![0.0; k],
        }
    }
}

/// Bracket `[x, y] ∈ z` of two v-vectors: component i is `⟨Jᵢ x, y⟩`.
pub fn bracket(p: &SkewPencil, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    if x.len() != p.m || y.len() != p.m {
        return Err(Error::Shape(format!(
            "bracket arguments must have length {}",
            p.m
        )));
    }
    Ok(p.j.iter().map(|ji| linalg::dot(&ji.mul_vec(x), y)).collect())
}

/// True iff the common kernel of all generators is trivial, i.e. the center
/// of the algebra is exactly z.
pub fn center_reduced(p: &SkewPencil) -> bool {
    let mut stacked = Matrix::zeros(p.k * p.m, p.m);
    for (i, ji) in p.j.iter().enumerate() {
        for r in 0..p.m {
            for c in 0..p.m {
                stacked.set(i * p.m + r, c, ji.get(r, c));
            }
        }
    }
    let (_, basis) = nullspace_default(&stacked);
    basis.is_empty()
}

fn nullspace_default(m: &Matrix) -> (usize, Vec<Vec<f64>>) {
    linalg::nullspace(m, Tolerances::default().spectral).expect("positive tolerance")
}

/// Group multiplication in exponential coordinates:
/// `(x, z)·(x′, z′) = (x + x′, z + z′ + ½[x, x′])`.
pub fn group_mul(p: &SkewPencil, g: &GroupPoint, h: &GroupPoint) -> Result<GroupPoint> {
    if g.x.len() != p.m || h.x.len() != p.m || g.z.len() != p.k || h.z.len() != p.k {
        return Err(Error::Shape("group point dimensions do not match pencil".into()));
    }
    let x: Vec<f64> = g.x.iter().zip(&h.x).map(|(a, b)| a + b).collect();
    let br = bracket(p, &g.x, &h.x)?;
    let z: Vec<f64> = g
        .z
        .iter()
        .zip(&h.z)
        .zip(&br)
        .map(|((a, b), c)| a + b + 0.5 * c)
        .collect();
    Ok(GroupPoint::new(x, z))
}

/// Group inverse `(x, z)⁻¹ = (−x, −z)`.
pub fn group_inverse(g: &GroupPoint) -> GroupPoint {
    GroupPoint {
        x: g.x.iter().map(|a| -a).collect(),
        z: g.z.iter().map(|a| -a).collect(),
    }
}

/// Matrix of `Id − ½ ad_v` in the orthonormal basis; composing with left
/// translation gives the differential of the exponential map at `v`.
pub fn exp_pushforward(p: &SkewPencil, v: &[f64]) -> Result<Matrix> {
    let n = p.dim();
    if v.len() != n {
        return Err(Error::Shape(format!("expected a vector of length {n}")));
    }
    let xv = &v[..p.m];
    let mut out = Matrix::identity(n);
    for b in 0..p.m {
        // ad_v(e_b) = [x_v, e_b], a z-vector with components ⟨Jᵢ x_v, e_b⟩
        for (i, ji) in p.j.iter().enumerate() {
            let comp = ji.mul_vec(xv)[b];
            out.set(p.m + i, b, -0.5 * comp);
        }
    }
    Ok(out)
}


/// Connection coefficients `Γ[a][b][c] = ⟨∇_{e_a} e_b, e_c⟩` in the fixed
/// orthonormal basis (v first, then z).
#[derive(Debug, Clone)]
pub struct ConnectionTable {
    n: usize,
    coeffs: Vec<f64>,
}

impl ConnectionTable {
    fn zeros(n: usize) -> Self {
        ConnectionTable {
            n,
            coeffs: vec![0.0; n * n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.coeffs[(a * self.n + b) * self.n + c]
    }

    #[inline]
    fn set(&mut self, a: usize, b: usize, c: usize, v: f64) {
        self.coeffs[(a * self.n + b) * self.n + c] = v;
    }

    /// Covariant derivative of the left-invariant field `e_b` along `e_a`,
    /// as a coefficient vector.
    pub fn derivative(&self, a: usize, b: usize) -> Vec<f64> {
        (0..self.n).map(|c| self.get(a, b, c)).collect()
    }

    /// Max over (a,b,c) of |Γ[a][b][c] + Γ[a][c][b]|; zero for a metric
    /// connection.
    pub fn metric_compat_violation(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in 0..self.n {
            for b in 0..self.n {
                for c in 0..self.n {
                    worst = worst.max((self.get(a, b, c) + self.get(a, c, b)).abs());
                }
            }
        }
        worst
    }

    /// Max entrywise difference against another table.
    pub fn max_diff(&self, other: &ConnectionTable) -> f64 {
        assert_eq!(self.n, other.n);
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// Structure constant `⟨[e_a, e_b], e_c⟩` of the full algebra.
fn structure_constant(p: &SkewPencil, a: usize, b: usize, c: usize) -> f64 {
    if a < p.m && b < p.m && c >= p.m {
        p.j[c - p.m].get(b, a)
    } else {
        0.0
    }
}

/// Levi-Civita connection from the closed form for two-step nilpotent
/// algebras: `∇_x y = ½[x,y]`, `∇_x w = ∇_w x = −½ j(w)x`, `∇_w w′ = 0`.
pub fn connection_closed_form(p: &SkewPencil) -> ConnectionTable {
    let (m, n) = (p.m, p.dim());
    let mut table = ConnectionTable::zeros(n);
    for (i, ji) in p.j.iter().enumerate() {
        for a in 0..m {
            for b in 0..m {
                // ⟨½[e_a, e_b], z_i⟩ = ½ Jᵢ[b][a]
                table.set(a, b, m + i, 0.5 * ji.get(b, a));
            }
        }
        for b in 0..m {
            for c in 0..m {
                // ∇_{z_i} e_b = ∇_{e_b} z_i = −½ Jᵢ e_b
                table.set(m + i, b, c, -0.5 * ji.get(c, b));
                table.set(b, m + i, c, -0.5 * ji.get(c, b));
            }
        }
    }
    table
}

/// Levi-Civita connection evaluated from structure constants only, via the
/// Koszul formula on orthonormal left-invariant fields:
/// `2⟨∇_X Y, Z⟩ = ⟨[X,Y],Z⟩ − ⟨[Y,Z],X⟩ + ⟨[Z,X],Y⟩`.
///
/// Independent of [`connection_closed_form`]; the two must agree.
pub fn connection_koszul(p: &SkewPencil) -> ConnectionTable {
    let n = p.dim();
    let mut table = ConnectionTable::zeros(n);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let v = 0.5
                    * (structure_constant(p, a, b, c) - structure_constant(p, b, c, a)
                        + structure_constant(p, c, a, b));
                table.set(a, b, c, v);
            }
        }
    }
    table
}

/// Full Riemann curvature tensor `R[a][b][c][d] = ⟨R(e_a,e_b)e_c, e_d⟩` with
/// `R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_{[X,Y]} Z` on left-invariant fields.
#[derive(Debug, Clone)]
pub struct CurvatureTensor {
    n: usize,
    vals: Vec<f64>,
}

impl CurvatureTensor {
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.vals[((a * self.n + b) * self.n + c) * self.n + d]
    }

    /// Max violation of the antisymmetries R(a,b,c,d) = −R(b,a,c,d) =
    /// −R(a,b,d,c).
    pub fn antisymmetry_violation(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        worst = worst.max((self.get(a, b, c, d) + self.get(b, a, c, d)).abs());
                        worst = worst.max((self.get(a, b, c, d) + self.get(a, b, d, c)).abs());
                    }
                }
            }
        }
        worst
    }

    /// Max violation of the first Bianchi identity
    /// `R(a,b,c,d) + R(b,c,a,d) + R(c,a,b,d) = 0`.
    pub fn bianchi_violation(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let s = self.get(a, b, c, d) + self.get(b, c, a, d) + self.get(c, a, b, d);
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }

    /// Ricci form by contraction: `Ric[b][c] = Σ_a R[a][b][c][a]`.
    pub fn ricci_contraction(&self) -> Matrix {
        let n = self.n;
        Matrix::from_fn(n, n, |b, c| (0..n).map(|a| self.get(a, b, c, a)).sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().fold(0.0, |m, v| f64::max(m, v.abs()))
    }
}

/// Computes the full curvature tensor from the closed-form connection.
/// Serves as the independent oracle for the Ricci form.
pub fn curvature_tensor(p: &SkewPencil) -> CurvatureTensor {
    let n = p.dim();
    let gamma = connection_closed_form(p);
    let mut vals = vec![0.0; n * n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let mut s = 0.0;
                    for e in 0..n {
                        s += gamma.get(b, c, e) * gamma.get(a, e, d)
                            - gamma.get(a, c, e) * gamma.get(b, e, d)
                            - structure_constant(p, a, b, e) * gamma.get(e, c, d);
                    }
                    vals[((a * n + b) * n + c) * n + d] = s;
                }
            }
        }
    }
    CurvatureTensor { n, vals }
}

/// The Ricci curvature of the left-invariant metric as a symmetric bilinear
/// form on `v ⊕ z`, in the fixed basis order.
#[derive(Debug, Clone)]
pub struct RicciForm {
    m: usize,
    k: usize,
    matrix: Matrix,
}

impl RicciForm {
    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// The restriction to `v ⊗ v` as an m×m matrix.
    pub fn v_block(&self) -> Matrix {
        Matrix::from_fn(self.m, self.m, |i, j| self.matrix.get(i, j))
    }

    /// The restriction to `z ⊗ z` as a k×k matrix.
    pub fn z_block(&self) -> Matrix {
        Matrix::from_fn(self.k, self.k, |i, j| self.matrix.get(self.m + i, self.m + j))
    }

    /// Largest |entry| of the v–z cross block; zero for these metrics.
    pub fn cross_max_abs(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.m {
            for j in 0..self.k {
                worst = worst.max(self.matrix.get(i, self.m + j).abs());
            }
        }
        worst
    }

    /// Evaluates the form on a v-vector: `Ric(x, x)`.
    pub fn eval_v(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.m);
        let vb = self.v_block();
        linalg::dot(&vb.mul_vec(x), x)
    }

    /// Checks the structural invariants: symmetry, negative semidefinite
    /// v-block, positive semidefinite z-block, vanishing cross block.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let scale = Tolerances::scale_of(&self.matrix);
        let bound = tol * scale;
        if self.matrix.symmetry_violation() > bound {
            return Err(Error::Numerical("Ricci form is not symmetric".into()));
        }
        if self.cross_max_abs() > bound {
            return Err(Error::Numerical("Ricci v-z cross block is nonzero".into()));
        }
        let (ev, _) = linalg::sym_eigen(&self.v_block())?;
        if ev.iter().any(|&l| l > bound) {
            return Err(Error::Numerical(
                "Ricci v-block is not negative semidefinite".into(),
            ));
        }
        let (ez, _) = linalg::sym_eigen(&self.z_block())?;
        if ez.iter().any(|&l| l < -bound) {
            return Err(Error::Numerical(
                "Ricci z-block is not positive semidefinite".into(),
            ));
        }
        Ok(())
    }
}

/// Ricci form of the left-invariant metric: v-block `½ Σᵢ Jᵢ²`, z-block
/// `¼ trace(JᵢᵀJⱼ)`, cross block zero.
///
/// The z- and cross blocks are confirmed against [`curvature_tensor`] in the
/// test suites rather than taken on faith.
pub fn ricci_form(p: &SkewPencil) -> RicciForm {
    let (m, k, n) = (p.m, p.k, p.dim());
    let mut out = Matrix::zeros(n, n);
    let mut vblock = Matrix::zeros(m, m);
    for ji in &p.j {
        vblock = vblock.add(&ji.mul(ji));
    }
    for i in 0..m {
        for j in 0..m {
            out.set(i, j, 0.5 * vblock.get(i, j));
        }
    }
    for i in 0..k {
        for j in 0..k {
            let gram = p.j[i].transpose().mul(&p.j[j]).trace();
            out.set(m + i, m + j, 0.25 * gram);
        }
    }
    RicciForm { m, k, matrix: out }
}

/// Scalar curvature of the ambient nilmanifold — a constant, the trace of
/// the Ricci form, equal to `−¼ Σᵢ trace(JᵢᵀJᵢ)`.
pub fn scal_ambient(p: &SkewPencil) -> f64 {
    ricci_form(p).matrix().trace()
}

// ---------------------------------------------------------------------------
// exact rational view and JSON input

/// Pencil over exact rationals, used by the exact isospectrality mode.
#[derive(Debug, Clone)]
pub struct RationalPencil {
    m: usize,
    k: usize,
    j: Vec<RationalMatrix>,
}

impl RationalPencil {
    pub fn new(m: usize, k: usize, j: Vec<RationalMatrix>) -> Result<Self> {
        if j.len() != k {
            return Err(Error::Shape(format!(
                "expected {k} generator matrices, got {}",
                j.len()
            )));
        }
        for (i, mat) in j.iter().enumerate() {
            if mat.rows() != m || mat.cols() != m {
                return Err(Error::Shape(format!("generator {i} has wrong dimensions")));
            }
            if !mat.is_skew_symmetric() {
                return Err(Error::InvalidInput(format!(
                    "generator {i} is not exactly skew-symmetric"
                )));
            }
        }
        Ok(RationalPencil { m, k, j })
    }

    /// Exact view of a floating-point pencil (every finite f64 is rational).
    pub fn from_float(p: &SkewPencil) -> Result<Self> {
        let j = p
            .j
            .iter()
            .map(RationalMatrix::from_float)
            .collect::<Result<Vec<_>>>()?;
        RationalPencil::new(p.m, p.k, j)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn generators(&self) -> &[RationalMatrix] {
        &self.j
    }
}

/// A pencil parsed from JSON, with the exact view when all entries are
/// exactly skew.
#[derive(Debug, Clone)]
pub struct ParsedPencil {
    pub pencil: SkewPencil,
    pub exact: Option<RationalPencil>,
}

#[derive(Deserialize)]
struct PencilJson {
    m: usize,
    k: usize,
    #[serde(rename = "J")]
    j: Vec<serde_json::Value>,
}

/// Parses `{"m":M,"k":K,"J":[<matrix JSON>, ...]}`.
pub fn pencil_from_json_str(s: &str) -> Result<ParsedPencil> {
    let raw: PencilJson =
        serde_json::from_str(s).map_err(|e| Error::Parse(format!("pencil JSON: {e}")))?;
    let mut numeric = Vec::new();
    let mut exact = Vec::new();
    for v in &raw.j {
        let parsed = linalg::matrix_from_json_value(v)?;
        numeric.push(parsed.numeric);
        exact.push(parsed.exact);
    }
    let pencil = SkewPencil::new(raw.m, raw.k, numeric)?;
    let exact = RationalPencil::new(raw.m, raw.k, exact).ok();
    Ok(ParsedPencil { pencil, exact })
}
