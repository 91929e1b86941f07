//! Scalar boundary interpolation in `H(K_s)`.
//!
//! For a finite Blaschke product `s`, higher-order Carathéodory–Julia
//! conditions hold automatically at every boundary point, so the boundary
//! Taylor coefficients `s_j(t)` exist to all orders and the boundary kernels
//! `K_{t,j}` lie in `H(K_s)`.  Prescribing `f_j(t_i) = f_{ij}` for
//! `j ≤ n_i` is then a special case of the abstract problem with structured
//! matrices: block Jordan `T` with `t̄_i` on the diagonal, coordinate rows
//! `E`, rows of conjugated boundary coefficients `N`, and a Gram matrix `P`
//! available in closed form from boundary limits (Hankel × Ψ × triangular
//! Toeplitz blocks).  The solve path injects that `P` and routes through the
//! colligation machinery; solutions are verified by radial limits.

use num_complex::Complex64;

use crate::aipdata::{check_admissible, solvability, AipDataSet, Solvability};
use crate::numlin::{adjoint, eye, fro_norm, lin_solve, zeros, Tolerances};
use crate::rational::SchurFunction;
use crate::redheffer::build_colligation;
use crate::solve::{aip_solve, SolutionFamily};
use crate::{CMat, CVec, Error, Result};

/// Boundary interpolation data: nodes on the circle (stored as angles so
/// that `|t_i| = 1` holds exactly), orders, and target Taylor values.
#[derive(Debug, Clone)]
pub struct BoundaryDataSet {
    /// Finite Blaschke product (certified inner, scalar).
    pub s: SchurFunction,
    /// Angles θ_i of the nodes `t_i = e^{iθ_i}`.
    pub angles: Vec<f64>,
    /// Orders `n_i`: conditions `f_j(t_i) = f_{ij}` for `0 ≤ j ≤ n_i`.
    pub orders: Vec<usize>,
    /// Targets `f_{ij}`, one `Vec` of length `n_i + 1` per node.
    pub targets: Vec<Vec<Complex64>>,
}

impl BoundaryDataSet {
    pub fn new(
        s: SchurFunction,
        angles: Vec<f64>,
        orders: Vec<usize>,
        targets: Vec<Vec<Complex64>>,
    ) -> Result<Self> {
        if s.input_dim() != 1 || s.output_dim() != 1 {
            return Err(Error::Precondition(
                "boundary data: s must be scalar-valued".into(),
            ));
        }
        if s.certified_inner.is_none() {
            return Err(Error::Precondition(
                "boundary data: s must carry an inner certificate".into(),
            ));
        }
        let k = angles.len();
        if orders.len() != k || targets.len() != k || k == 0 {
            return Err(Error::Input(
                "boundary data: angles/orders/targets lengths must match and be nonempty".into(),
            ));
        }
        for (i, tgt) in targets.iter().enumerate() {
            if tgt.len() != orders[i] + 1 {
                return Err(Error::Input(format!(
                    "boundary data: node {i} has order {} but {} targets",
                    orders[i],
                    tgt.len()
                )));
            }
        }
        for i in 0..k {
            for j in 0..i {
                let d = (Complex64::from_polar(1.0, angles[i])
                    - Complex64::from_polar(1.0, angles[j]))
                .norm();
                if d < 1e-10 {
                    return Err(Error::Input(format!(
                        "boundary data: nodes {j} and {i} coincide"
                    )));
                }
            }
        }
        Ok(BoundaryDataSet {
            s,
            angles,
            orders,
            targets,
        })
    }

    /// The nodes `t_i = e^{iθ_i}`.
    pub fn points(&self) -> Vec<Complex64> {
        self.angles
            .iter()
            .map(|&th| Complex64::from_polar(1.0, th))
            .collect()
    }

    /// Total number of interpolation conditions `Σ (n_i + 1)`.
    pub fn total_dim(&self) -> usize {
        self.orders.iter().map(|n| n + 1).sum()
    }
}

/// Boundary Taylor coefficients `s_0, …, s_m` of a rational Schur function at
/// a boundary point, computed exactly from the realization by resolvent
/// calculus: `s_0 = D + tC(I−tA)⁻¹B` and `s_j = CA^{j−1}(I−tA)^{−(j+1)}B`
/// for `j ≥ 1`.
pub fn boundary_taylor(s: &SchurFunction, t: Complex64, order: usize) -> Result<Vec<Complex64>> {
    if (t.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::Domain(format!(
            "boundary_taylor: |t| = {} is not on the circle",
            t.norm()
        )));
    }
    let r = &s.realization;
    let n = r.state_dim();
    if n == 0 {
        let mut out = vec![r.d[(0, 0)]];
        out.resize(order + 1, Complex64::new(0.0, 0.0));
        return Ok(out);
    }
    // ρ(A) < 1 for a finite Blaschke product, so I − tA is invertible on the
    // circle; a singular resolvent means a pole at t.
    let res = lin_solve(&(&eye(n) - &r.a.mapv(|v| v * t)), &eye(n))
        .map_err(|_| Error::Pole { z: t })?;
    let mut out = Vec::with_capacity(order + 1);
    out.push(r.d[(0, 0)] + (r.c.dot(&res).dot(&r.b)).mapv(|v| v * t)[(0, 0)]);
    let mut left = r.c.dot(&res); // C(I−tA)⁻¹ … A^{j−1}(I−tA)^{−j} accumulates
    for _ in 1..=order {
        out.push(left.dot(&res).dot(&r.b)[(0, 0)]);
        left = left.dot(&r.a).dot(&res);
    }
    Ok(out)
}

/// Boundary reproducing kernel
/// `K_{t₀,j}(z) = z^j/(1−zt̄₀)^{j+1} − s(z)·Σ_{ℓ≤j} z^{j−ℓ}s̄_ℓ/(1−zt̄₀)^{j+1−ℓ}`
/// evaluated at an interior point `z`.
pub fn boundary_kernel(
    s: &SchurFunction,
    t0: Complex64,
    j: usize,
    z: Complex64,
) -> Result<Complex64> {
    if z.norm() >= 1.0 {
        return Err(Error::Domain(format!(
            "boundary_kernel: z = {z} not in the open disk"
        )));
    }
    let coeffs = boundary_taylor(s, t0, j)?;
    boundary_kernel_with(s, t0, &coeffs, j, z)
}

fn boundary_kernel_with(
    s: &SchurFunction,
    t0: Complex64,
    coeffs: &[Complex64],
    j: usize,
    z: Complex64,
) -> Result<Complex64> {
    let denom = Complex64::new(1.0, 0.0) - z * t0.conj();
    let sz = s.eval(z)?[(0, 0)];
    let mut sum = Complex64::new(0.0, 0.0);
    for l in 0..=j {
        sum += z.powu((j - l) as u32) * coeffs[l].conj() / denom.powu((j + 1 - l) as u32);
    }
    Ok(z.powu(j as u32) / denom.powu((j + 1) as u32) - sz * sum)
}

/// Structured matrices `(T, E, N, x)` of the boundary problem: block Jordan
/// `T_i` with `t̄_i` on the diagonal and ones above it, coordinate rows
/// `E_i = [1 0 … 0]`, conjugated boundary coefficients
/// `N_i = [s̄_{i,0} … s̄_{i,n_i}]`, and targets `x_{ij} = f_{ij}`.
pub fn build_boundary_data(bd: &BoundaryDataSet) -> Result<(CMat, CMat, CMat, CVec)> {
    let dim = bd.total_dim();
    let mut t = zeros(dim, dim);
    let mut e = zeros(1, dim);
    let mut n = zeros(1, dim);
    let mut x = ndarray::Array1::zeros(dim);
    let points = bd.points();
    let mut off = 0usize;
    for (i, &ti) in points.iter().enumerate() {
        let ni = bd.orders[i];
        let coeffs = boundary_taylor(&bd.s, ti, ni)?;
        for j in 0..=ni {
            t[(off + j, off + j)] = ti.conj();
            if j + 1 <= ni {
                t[(off + j, off + j + 1)] = Complex64::new(1.0, 0.0);
            }
            n[(0, off + j)] = coeffs[j].conj();
            x[off + j] = bd.targets[i][j];
        }
        e[(0, off)] = Complex64::new(1.0, 0.0);
        off += ni + 1;
    }
    Ok((t, e, n, x))
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * ((n - i) as f64) / ((i + 1) as f64);
    }
    acc
}

/// The upper triangular matrix `Ψ_n(t)` with
/// `Ψ_{jℓ} = (−1)^ℓ C(ℓ,j) t^{ℓ+j+1}` for `0 ≤ j ≤ ℓ ≤ n`.
fn psi_matrix(n: usize, t: Complex64) -> CMat {
    let mut m = zeros(n + 1, n + 1);
    for j in 0..=n {
        for l in j..=n {
            let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
            m[(j, l)] = t.powu((l + j + 1) as u32) * sign * binomial(l, j);
        }
    }
    m
}

/// Upper triangular Toeplitz matrix with first row `s̄_0 … s̄_n`.
fn ut_toeplitz(coeffs: &[Complex64], n: usize) -> CMat {
    let mut m = zeros(n + 1, n + 1);
    for l in 0..=n {
        for r in l..=n {
            m[(l, r)] = coeffs[r - l].conj();
        }
    }
    m
}

/// Closed-form Gram matrix `P = [⟨K_{t_i,ℓ}, K_{t_j,r}⟩]` from boundary
/// limits: diagonal blocks `Hankel[s_{i,ℓ+r+1}]·Ψ_{n_i}(t_i)·UT(s̄_i)`, and
/// off-diagonal blocks through the two-point divided-coefficient matrix
/// `H_{ij}`.  A non-Hermitian result beyond tolerance flags a
/// Carathéodory–Julia violation (non-inner input).
pub fn compute_p_boundary(bd: &BoundaryDataSet, tol: &Tolerances) -> Result<CMat> {
    let dim = bd.total_dim();
    let points = bd.points();
    let k = points.len();
    let mut coeffs = Vec::with_capacity(k);
    for (i, &ti) in points.iter().enumerate() {
        coeffs.push(boundary_taylor(&bd.s, ti, 2 * bd.orders[i] + 1)?);
    }
    let offsets: Vec<usize> = {
        let mut off = vec![0usize];
        for i in 0..k {
            off.push(off[i] + bd.orders[i] + 1);
        }
        off
    };
    let mut p = zeros(dim, dim);
    for i in 0..k {
        let ni = bd.orders[i];
        for j in 0..k {
            let nj = bd.orders[j];
            let h = if i == j {
                let mut m = zeros(ni + 1, ni + 1);
                for l in 0..=ni {
                    for r in 0..=ni {
                        m[(l, r)] = coeffs[i][l + r + 1];
                    }
                }
                m
            } else {
                let mut m = zeros(ni + 1, nj + 1);
                let d = points[i] - points[j];
                for r in 0..=ni {
                    for mm in 0..=nj {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for l in 0..=r {
                            let sign = if (r - l) % 2 == 0 { 1.0 } else { -1.0 };
                            acc += coeffs[i][l] * sign * binomial(mm + r - l, mm)
                                / d.powu((mm + r - l + 1) as u32);
                        }
                        for l in 0..=mm {
                            let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
                            acc -= coeffs[j][l] * sign * binomial(mm + r - l, r)
                                / d.powu((mm + r - l + 1) as u32);
                        }
                        m[(r, mm)] = acc;
                    }
                }
                m
            };
            let block = h
                .dot(&psi_matrix(nj, points[j]))
                .dot(&ut_toeplitz(&coeffs[j], nj));
            for r in 0..=ni {
                for c in 0..=nj {
                    p[(offsets[i] + r, offsets[j] + c)] = block[(r, c)];
                }
            }
        }
    }
    let herm_defect = fro_norm(&(&p - &adjoint(&p)));
    let scale = 1.0 + fro_norm(&p);
    if herm_defect > 1e3 * tol.residual_tol * scale {
        return Err(Error::NotAdmissible(format!(
            "compute_p_boundary: P not Hermitian (defect {herm_defect:.3e}); \
             Carathéodory–Julia conditions violated"
        )));
    }
    Ok((&p + &adjoint(&p)).mapv(|v| v * 0.5))
}

/// Result of the boundary solve: the solution family plus the injected `P`
/// and the worst radial verification residual of the minimal solution.
pub struct BoundarySolution {
    pub family: SolutionFamily,
    pub p: CMat,
    pub solvability: Solvability,
    /// `max_{i,j} |extrapolated f_j(t_i) − f_{ij}|` for the central solution.
    pub radial_worst: f64,
}

/// Taylor coefficients `f_0 … f_order` of a pointwise-evaluable function at
/// an interior point `z0`, by a small contour of radius `rho`.
fn local_taylor<F>(f: &F, z0: Complex64, rho: f64, order: usize) -> Result<Vec<Complex64>>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let npts = 48usize.max(8 * (order + 1));
    let mut sums = vec![Complex64::new(0.0, 0.0); order + 1];
    for kk in 0..npts {
        let th = 2.0 * std::f64::consts::PI * (kk as f64) / (npts as f64);
        let v = f(z0 + Complex64::from_polar(rho, th))?;
        for (j, sum) in sums.iter_mut().enumerate() {
            *sum += v * Complex64::from_polar(1.0, -(j as f64) * th);
        }
    }
    Ok(sums
        .iter()
        .enumerate()
        .map(|(j, &sv)| sv / (npts as f64) / rho.powi(j as i32))
        .collect())
}

/// Richardson-extrapolated radial boundary Taylor coefficients of `f` at the
/// node `t`: samples along radii `1 − 2^{−m}`, `m = 4..12`, each refined by a
/// local contour, then two extrapolation levels in the step `2^{−m}`.
pub fn radial_taylor<F>(f: &F, t: Complex64, order: usize) -> Result<Vec<Complex64>>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let ms: Vec<i32> = (4..=12).collect();
    let mut rows: Vec<Vec<Complex64>> = Vec::with_capacity(ms.len());
    for &m in &ms {
        let h = 2f64.powi(-m);
        let z0 = t * (1.0 - h);
        rows.push(local_taylor(f, z0, h / 2.0, order)?);
    }
    // v(h) = v + c₁h + c₂h² + …, h halving each step: two Richardson levels.
    let mut level1: Vec<Vec<Complex64>> = Vec::new();
    for w in rows.windows(2) {
        level1.push(
            (0..=order)
                .map(|j| w[1][j] * 2.0 - w[0][j])
                .collect(),
        );
    }
    let mut level2: Vec<Vec<Complex64>> = Vec::new();
    for w in level1.windows(2) {
        level2.push(
            (0..=order)
                .map(|j| (w[1][j] * 4.0 - w[0][j]) / 3.0)
                .collect(),
        );
    }
    Ok(level2.last().cloned().unwrap_or_else(|| rows.last().cloned().unwrap()))
}

/// Solve the boundary problem: build the structured matrices, inject the
/// closed-form `P` (verifying the Stein identity it must satisfy), route
/// through the colligation machinery, and verify the central solution by
/// radial limits at every node.
pub fn solve_boundary(bd: &BoundaryDataSet, tol: &Tolerances) -> Result<BoundarySolution> {
    let (t, e, n, x) = build_boundary_data(bd)?;
    let p = compute_p_boundary(bd, tol)?;
    // The structured P must satisfy the Stein identity for these matrices.
    let stein = &(&p - &adjoint(&t).dot(&p).dot(&t))
        - &(&adjoint(&e).dot(&e) - &adjoint(&n).dot(&n));
    let scale = 1.0 + fro_norm(&p);
    if fro_norm(&stein) > tol.residual_tol.max(1e-8) * scale {
        return Err(Error::Internal(format!(
            "solve_boundary: closed-form P violates its Stein identity \
             (residual {:.3e})",
            fro_norm(&stein)
        )));
    }
    let sv = solvability(&p, &x, tol)?;
    if !sv.solvable {
        return Err(Error::Unsolvable { margin: sv.margin });
    }
    let data = AipDataSet::new(bd.s.clone(), t, e, n, x, tol)?;
    let report = check_admissible(&data, &p, tol)?;
    if !report.is_admissible(tol) {
        return Err(Error::NotAdmissible(format!(
            "solve_boundary: data failed admissibility: {report:?}"
        )));
    }
    let col = build_colligation(&p, &data.t, &data.e, &data.n, tol)?;
    let family = aip_solve(&data, &col, None, tol)?;
    let mut radial_worst: f64 = 0.0;
    let eval = |z: Complex64| -> Result<Complex64> { Ok(family.eval(z)?[(0, 0)]) };
    for (i, &ti) in bd.points().iter().enumerate() {
        let got = radial_taylor(&eval, ti, bd.orders[i])?;
        for j in 0..=bd.orders[i] {
            radial_worst = radial_worst.max((got[j] - bd.targets[i][j]).norm());
        }
    }
    Ok(BoundarySolution {
        family,
        p,
        solvability: sv,
        radial_worst,
    })
}
