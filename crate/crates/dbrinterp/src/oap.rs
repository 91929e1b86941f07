//! Operator-argument interpolation in `H²` and its reduction to the general
//! problem.
//!
//! Given a Schur function `S` and an output-stable pair `(E,T)`, the matrix
//! `N = Σ_j S_j* E T^j` turns the operator-argument condition
//! `(E*f)^{∧L}(T*) = x` into an admissible data set `{S,T,E,N,x}`.  The
//! special case `S ≡ 0` (plain `H²` interpolation) is solved in closed form:
//! the minimal solution is `E(I−zT)⁻¹P⁻¹x` and the homogeneous solutions are
//! `B·H²` for an inner function `B` read off from a unitary completion of the
//! isometry `[P^½TP^{−½}; EP^{−½}]`.  Constructors for classical
//! Nevanlinna–Pick and Carathéodory–Fejér data round out the module.

use ndarray::{s, Array1, Array2};
use num_complex::Complex64;

use crate::aipdata::{obs_gramian, AipDataSet};
use crate::numlin::{
    adjoint, col as colvec, eye, fro_norm, lin_solve, psd_check, solve_displacement, sqrt_psd,
    unitary_completion, zeros, Tolerances,
};
use crate::rational::{certify_schur_default, Realization, SchurFunction};
use crate::{CMat, CVec, Error, Result};

/// `N = Σ_j S_j* E T^j`, computed exactly from `S`'s realization via the
/// Sylvester solve `Y − A_S* Y T = C_S* E`, giving `N = D_S*E + B_S* Y T`.
pub fn build_n(s: &SchurFunction, e: &CMat, t: &CMat) -> Result<CMat> {
    if crate::numlin::spectral_radius(t) >= 1.0 {
        return Err(Error::Domain("build_n: requires ρ(T) < 1".into()));
    }
    if e.nrows() != s.output_dim() {
        return Err(Error::Dimension(format!(
            "build_n: E has {} rows, S has {} outputs",
            e.nrows(),
            s.output_dim()
        )));
    }
    let r = &s.realization;
    let y = solve_displacement(&adjoint(&r.a), t, &adjoint(&r.c).dot(e))?;
    Ok(&adjoint(&r.d).dot(e) + &adjoint(&r.b).dot(&y).dot(t))
}

/// Assemble the data set `{S, T, E, build_n(S,E,T), x}` for the
/// operator-argument problem.
pub fn oap_to_aip(
    s: SchurFunction,
    t: CMat,
    e: CMat,
    x: CVec,
    tol: &Tolerances,
) -> Result<AipDataSet> {
    let n = build_n(&s, &e, &t)?;
    AipDataSet::new(s, t, e, n, x, tol)
}

/// Closed-form `H²` solution data.
pub struct H2Solution {
    /// Minimal-norm solution `f_min(z) = E(I−zT)⁻¹P⁻¹x`.
    pub f_min: Realization,
    /// Inner function `B` with solution set `f_min + B·(ball of H²)`.
    pub b: SchurFunction,
    /// `√(1 − x*P⁻¹x)`.
    pub budget: f64,
    /// The Gram operator `P = 𝒪_{E,T}*𝒪_{E,T}`.
    pub p: CMat,
}

/// Solve the `H²` interpolation problem `(E*f)^{∧L}(T*) = x`, `‖f‖_{H²} ≤ 1`.
///
/// Constructs `A = P^½TP^{−½}`, `C₁ = EP^{−½}`, completes the isometry
/// `[A; C₁]` to a unitary whose added columns give `[B₂; D₁₂]`, and returns
/// the inner function `B(z) = D₁₂ + zC₁(I−zA)⁻¹B₂` (deterministic up to the
/// fixed completion order, hence up to a constant unitary factor).
pub fn h2_solve(e: &CMat, t: &CMat, x: &CVec, tol: &Tolerances) -> Result<H2Solution> {
    let n = t.nrows();
    let q = e.nrows();
    let p = obs_gramian(e, t, tol)?;
    let verdict = psd_check(&p, tol)?;
    if verdict.min_eigenvalue < tol.psd_tol {
        return Err(Error::Domain(format!(
            "h2_solve: P is singular (min eig {:.3e}); the instance is degenerate",
            verdict.min_eigenvalue
        )));
    }
    let xc = colvec(x);
    let gap = psd_check(&(&p - &xc.dot(&adjoint(&xc))), tol)?;
    if !gap.is_psd {
        return Err(Error::Unsolvable {
            margin: gap.min_eigenvalue,
        });
    }
    let p_half = sqrt_psd(&p, tol)?;
    let p_half_inv = lin_solve(&p_half, &eye(n))?;
    let a = p_half.dot(t).dot(&p_half_inv);
    let c1 = e.dot(&p_half_inv);
    let v = crate::numlin::block(&[&[&a], &[&c1]]);
    let u = unitary_completion(&v, tol)?;
    let b2 = u.slice(s![..n, n..]).to_owned();
    let d12 = u.slice(s![n.., n..]).to_owned();
    let b_real = Realization::new(a, b2, c1, d12)?;
    let b = certify_schur_default(b_real, tol);
    if b.certified_inner.is_none() {
        return Err(Error::Internal(
            "h2_solve: constructed B failed its inner certification".into(),
        ));
    }
    let p_inv = lin_solve(&p, &eye(n))?;
    let f_min = Realization::observer(e, t, &p_inv.dot(&xc))?;
    let energy = adjoint(&xc).dot(&p_inv).dot(&xc)[(0, 0)].re;
    let budget = (1.0 - energy).max(0.0).sqrt();
    let _ = q;
    Ok(H2Solution {
        f_min,
        b,
        budget,
        p,
    })
}

impl H2Solution {
    /// Residual of the model-space kernel identity
    /// `K_B(z,ζ) = E(I−zT)⁻¹P⁻¹(I−ζ̄T*)⁻¹E*` at one point pair, with the
    /// data `(E,T)` that produced this solution.
    pub fn inner_kernel_residual(
        &self,
        e: &CMat,
        t: &CMat,
        z: Complex64,
        zeta: Complex64,
    ) -> Result<f64> {
        let n = t.nrows();
        let kb = crate::rational::kernel_ks(&self.b, z, zeta)?;
        let rz = lin_solve(&(&eye(n) - &t.mapv(|v| v * z)), &eye(n))?;
        let rzeta = lin_solve(&(&eye(n) - &t.mapv(|v| v * zeta)), &eye(n))?;
        let p_inv = lin_solve(&self.p, &eye(n))?;
        let rhs = e
            .dot(&rz)
            .dot(&p_inv)
            .dot(&adjoint(&rzeta))
            .dot(&adjoint(e));
        Ok(fro_norm(&(&kb - &rhs)))
    }
}

/// Nevanlinna–Pick data: nodes `w_i` in the open disk with scalar targets,
/// encoded as `T = diag(w̄_i)`, `E = [1 … 1]`, `x = targets`.
pub fn np_data(nodes: &[Complex64], targets: &[Complex64]) -> Result<(CMat, CMat, CVec)> {
    let k = nodes.len();
    if targets.len() != k {
        return Err(Error::Input("np_data: nodes/targets length mismatch".into()));
    }
    for (i, &w) in nodes.iter().enumerate() {
        if w.norm() >= 1.0 {
            return Err(Error::Domain(format!("np_data: node {w} not inside the disk")));
        }
        for &w2 in &nodes[..i] {
            if (w - w2).norm() < 1e-12 {
                return Err(Error::Input(format!(
                    "np_data: repeated node {w}; use cf_data for derivative conditions"
                )));
            }
        }
    }
    let t = Array2::from_shape_fn((k, k), |(i, j)| {
        if i == j {
            nodes[i].conj()
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let e = Array2::from_elem((1, k), Complex64::new(1.0, 0.0));
    let x = Array1::from_iter(targets.iter().copied());
    Ok((t, e, x))
}

/// Carathéodory–Fejér data: prescribe the first Taylor coefficients of `f`
/// at a point `w`, encoded as the Jordan block `T = w̄I + J` (superdiagonal
/// ones) with `E = [1 0 … 0]`; the targets are the Taylor coefficients
/// `f^{(j)}(w)/j!` themselves.
pub fn cf_data(point: Complex64, taylor_targets: &[Complex64]) -> Result<(CMat, CMat, CVec)> {
    if point.norm() >= 1.0 {
        return Err(Error::Domain(format!(
            "cf_data: expansion point {point} not inside the disk"
        )));
    }
    let m = taylor_targets.len();
    if m == 0 {
        return Err(Error::Input("cf_data: need at least one coefficient".into()));
    }
    let mut t = zeros(m, m);
    for i in 0..m {
        t[(i, i)] = point.conj();
        if i + 1 < m {
            t[(i, i + 1)] = Complex64::new(1.0, 0.0);
        }
    }
    let mut e = zeros(1, m);
    e[(0, 0)] = Complex64::new(1.0, 0.0);
    Ok((t, e, Array1::from_iter(taylor_targets.iter().copied())))
}
