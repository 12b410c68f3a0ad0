//! Independent oracles shared by the integration suites. Everything here
//! deliberately avoids the library's own computation paths: holonomy is
//! re-derived by numerical integration, lattice automorphisms by a raw box
//! scan, matrix rank by row reduction.

use nilspec::equiv::LatticeBasis;
use nilspec::linalg::{self, sym_eigen, Matrix};
use nilspec::nilalg::{bracket, SkewPencil};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn random_unit(m: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = linalg::norm(&v);
        if n > 1e-3 {
            return v.iter().map(|x| x / n).collect();
        }
    }
}

pub fn random_orthonormal_pair(m: usize, rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>) {
    loop {
        let x = random_unit(m, rng);
        let mut y = random_unit(m, rng);
        let d = linalg::dot(&x, &y);
        for i in 0..m {
            y[i] -= d * x[i];
        }
        let n = linalg::norm(&y);
        if n > 1e-3 {
            return (x, y.iter().map(|v| v / n).collect());
        }
    }
}

/// Fourth-order Runge-Kutta integration of the horizontal-lift equation
/// `ż = ½ [x(t), ẋ(t)]` over one loop of the great circle through (x, y),
/// starting from z = 0. Returns the final z — the fiber displacement.
pub fn rk4_lift_displacement(p: &SkewPencil, x: &[f64], y: &[f64], step: f64) -> Vec<f64> {
    let k = p.k();
    let rate = |t: f64| -> Vec<f64> {
        let (c, s) = (t.cos(), t.sin());
        let pos: Vec<f64> = x.iter().zip(y).map(|(a, b)| c * a + s * b).collect();
        let vel: Vec<f64> = x.iter().zip(y).map(|(a, b)| -s * a + c * b).collect();
        bracket(p, &pos, &vel)
            .expect("dimensions checked")
            .iter()
            .map(|v| 0.5 * v)
            .collect()
    };
    let t_end = 2.0 * std::f64::consts::PI;
    let steps = (t_end / step).ceil() as usize;
    let h = t_end / steps as f64;
    let mut z = vec![0.0; k];
    let mut t = 0.0;
    for _ in 0..steps {
        let k1 = rate(t);
        let k2 = rate(t + 0.5 * h);
        let k3 = rate(t + 0.5 * h);
        let k4 = rate(t + h);
        for i in 0..k {
            z[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        t += h;
    }
    z
}

/// Brute-force lattice automorphism enumeration: scans every integer matrix
/// whose column entries are within the Gram-derived bound and keeps those
/// preserving the Gram matrix. Independent of the library's column-wise
/// depth-first search.
pub fn brute_force_automorphisms(lattice: &LatticeBasis) -> Vec<Matrix> {
    let k = lattice.k();
    let g = lattice.gram();
    let (evals, _) = sym_eigen(&g).unwrap();
    let lambda_min = evals[0];
    let tol = 1e-9 * f64::max(1.0, g.max_abs());
    let col_bound: Vec<i64> = (0..k)
        .map(|j| (g.get(j, j) / lambda_min).sqrt().floor() as i64)
        .collect();

    let entries = k * k;
    let bound_of = |e: usize| col_bound[e / k]; // entry e belongs to column e/k
    let mut digits: Vec<i64> = (0..entries).map(|d| -bound_of(d)).collect();
    let b = lattice.basis();
    let b_inv = b.inverse().unwrap();
    let mut found = Vec::new();
    loop {
        // digits laid out column-major: digits[j*k + i] = U[i][j]
        let u = Matrix::from_fn(k, k, |i, j| digits[j * k + i] as f64);
        let defect = u.transpose().mul(&g).mul(&u).sub(&g).max_abs();
        if defect <= tol {
            found.push(b.mul(&u).mul(&b_inv));
        }
        // odometer increment
        let mut pos = 0;
        loop {
            if pos == entries {
                return found;
            }
            if digits[pos] < bound_of(pos) {
                digits[pos] += 1;
                break;
            }
            digits[pos] = -bound_of(pos);
            pos += 1;
        }
    }
}

/// Rank by Gaussian elimination with partial pivoting; pivots are counted
/// against a relative threshold.
pub fn rref_rank(m: &Matrix, tol: f64) -> usize {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a: Vec<f64> = m.entries().to_vec();
    let scale = m.max_abs().max(1.0);
    let mut rank = 0;
    let mut row = 0;
    for col in 0..cols {
        let mut piv = row;
        for r in (row + 1)..rows {
            if a[r * cols + col].abs() > a[piv * cols + col].abs() {
                piv = r;
            }
        }
        if piv >= rows || a[piv * cols + col].abs() <= tol * scale {
            continue;
        }
        if piv != row {
            for j in 0..cols {
                a.swap(row * cols + j, piv * cols + j);
            }
        }
        let d = a[row * cols + col];
        for r in 0..rows {
            if r == row {
                continue;
            }
            let f = a[r * cols + col] / d;
            if f == 0.0 {
                continue;
            }
            for j in col..cols {
                a[r * cols + j] -= f * a[row * cols + j];
            }
        }
        rank += 1;
        row += 1;
        if row == rows {
            break;
        }
    }
    rank
}

/// Commutant dimension the long way round: assemble the Sylvester operator
/// column by column from genuine matrix products, then count its nullity by
/// row reduction.
pub fn commutant_dimension_oracle(p: &SkewPencil) -> usize {
    let m = p.m();
    let mm = m * m;
    let mut op = Matrix::zeros(p.k() * mm, mm);
    for col in 0..mm {
        let basis = Matrix::from_fn(m, m, |i, j| if i * m + j == col { 1.0 } else { 0.0 });
        for (g, jg) in p.generators().iter().enumerate() {
            let defect = basis.mul(jg).sub(&jg.mul(&basis));
            for i in 0..m {
                for j in 0..m {
                    op.set(g * mm + i * m + j, col, defect.get(i, j));
                }
            }
        }
    }
    mm - rref_rank(&op, 1e-10)
}
