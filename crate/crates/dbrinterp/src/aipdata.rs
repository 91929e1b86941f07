//! Interpolation data sets `{S, T, E, N, x}` and their validation.
//!
//! A data set pairs a rational Schur-class function `S` (p inputs, q outputs)
//! with matrices `T` (n×n), `E` (q×n), `N` (p×n) and a target column `x`.
//! This module builds the Gram operator `P` from the Stein equation
//! `P − T*PT = E*E − N*N`, checks admissibility (analytic output pairs, the
//! Stein identity, and a grid positivity surrogate for the membership
//! condition), decides solvability (`P ⪰ xx*`), evaluates
//! `F^S(z) = (E − S(z)N)(I−zT)⁻¹`, applies the interpolation functional to
//! candidate solutions, and performs the Möbius change of variable that moves
//! interpolation data around the disk.

use num_complex::Complex64;

use crate::numlin::{
    adjoint, block, col, eye, fro_norm, lin_solve, psd_check, scalar, solve_displacement,
    solve_stein, spectral_radius, zeros, PsdVerdict, Tolerances,
};
use crate::rational::{certify_schur_default, kernel_ks, Realization, SchurFunction};
use crate::{CMat, CVec, Error, Result};

/// Interpolation data set `{S, T, E, N, x}`.
#[derive(Debug, Clone)]
pub struct AipDataSet {
    pub s: SchurFunction,
    pub t: CMat,
    pub e: CMat,
    pub n: CMat,
    pub x: CVec,
}

impl AipDataSet {
    pub fn new(s: SchurFunction, t: CMat, e: CMat, n: CMat, x: CVec, tol: &Tolerances) -> Result<Self> {
        let dim = t.nrows();
        if t.ncols() != dim {
            return Err(Error::Dimension("data set: T must be square".into()));
        }
        if e.ncols() != dim || n.ncols() != dim || x.len() != dim {
            return Err(Error::Dimension(format!(
                "data set: E ({}x{}), N ({}x{}), x ({}) must all have {} columns",
                e.nrows(),
                e.ncols(),
                n.nrows(),
                n.ncols(),
                x.len(),
                dim
            )));
        }
        if e.nrows() != s.output_dim() || n.nrows() != s.input_dim() {
            return Err(Error::Dimension(format!(
                "data set: E has {} rows (S outputs {}), N has {} rows (S inputs {})",
                e.nrows(),
                s.output_dim(),
                n.nrows(),
                s.input_dim()
            )));
        }
        let rho = spectral_radius(&t);
        if rho > 1.0 + tol.rank_tol.max(1e-8) {
            return Err(Error::Unstable { rho });
        }
        Ok(AipDataSet { s, t, e, n, x })
    }

    /// State dimension n.
    pub fn dim(&self) -> usize {
        self.t.nrows()
    }

    /// True when ρ(T) < 1 so Stein solves are available.
    pub fn is_strictly_stable(&self) -> bool {
        spectral_radius(&self.t) < 1.0
    }
}

/// Result of the admissibility checks.
#[derive(Debug, Clone)]
pub struct AdmissibilityReport {
    /// The (recomputed or injected) Gram operator.
    pub p: CMat,
    /// `‖P − T*PT − (E*E − N*N)‖_F`.
    pub stein_residual: f64,
    /// Analytic output pairs: ρ(T) ≤ 1 (within tolerance).
    pub obs_pairs_ok: bool,
    /// Smallest eigenvalue of the assembled membership kernel
    /// `[[P, F^S(ζ)*], [F^S(z), K_S(z,ζ)]]` over the test grid; the
    /// membership condition is surrogate-tested by requiring this to be
    /// ≥ −psd_tol (scaled).
    pub fs_membership_min_eig: f64,
    /// All three checks passed.
    pub psd_ok: bool,
}

impl AdmissibilityReport {
    pub fn is_admissible(&self, tol: &Tolerances) -> bool {
        self.obs_pairs_ok
            && self.stein_residual <= tol.residual_tol * (1.0 + fro_norm(&self.p))
            && self.psd_ok
    }
}

/// Observability Gramian `𝒪_{E,T}* 𝒪_{E,T} = Σ T*ⁿ E*E Tⁿ`, the unique
/// solution of `G − T*GT = E*E`.
pub fn obs_gramian(e: &CMat, t: &CMat, tol: &Tolerances) -> Result<CMat> {
    if spectral_radius(t) >= 1.0 {
        return Err(Error::Domain(
            "obs_gramian: (E,T) is not output stable (ρ(T) ≥ 1)".into(),
        ));
    }
    solve_stein(t, &adjoint(e).dot(e), tol)
}

/// Evaluate `F^S(z) = (E − S(z)N)(I−zT)⁻¹`.
pub fn eval_fs(data: &AipDataSet, z: Complex64) -> Result<CMat> {
    let dim = data.dim();
    let sz = data.s.eval(z)?;
    let num = &data.e - &sz.dot(&data.n);
    let m = &eye(dim) - &data.t.mapv(|v| v * z);
    let inv = lin_solve(&m, &eye(dim)).map_err(|_| Error::Pole { z })?;
    Ok(num.dot(&inv))
}

/// Gram operator `P = 𝒪_{E,T}*𝒪_{E,T} − 𝒪_{N,T}*𝒪_{N,T}`, computed as the
/// unique solution of the Stein equation `P − T*PT = E*E − N*N`.
///
/// Requires ρ(T) < 1; for boundary data (ρ(T) = 1) the Gram operator must be
/// supplied from the closed forms of the boundary module instead.
pub fn compute_p_oap(data: &AipDataSet, tol: &Tolerances) -> Result<CMat> {
    if !data.is_strictly_stable() {
        return Err(Error::Domain(
            "compute_p_oap: ρ(T) = 1; use the boundary closed forms for P".into(),
        ));
    }
    let q = &adjoint(&data.e).dot(&data.e) - &adjoint(&data.n).dot(&data.n);
    solve_stein(&data.t, &q, tol)
}

/// Default interior grid for the membership positivity surrogate:
/// 3 radii × 8 angles.
pub fn membership_grid() -> Vec<Complex64> {
    let mut pts = Vec::new();
    for &r in &[0.2, 0.5, 0.8] {
        for j in 0..8 {
            let th = 2.0 * std::f64::consts::PI * (j as f64) / 8.0 + 0.1;
            pts.push(Complex64::from_polar(r, th));
        }
    }
    pts
}

/// Assemble the Gram matrix of the 2×2-block kernel
/// `[[P, F^S(ζ)*], [F^S(z), K_S(z,ζ)]]` over the given points.
fn membership_gram(data: &AipDataSet, p: &CMat, points: &[Complex64]) -> Result<CMat> {
    let dim = data.dim();
    let q = data.s.output_dim();
    let g = points.len();
    let size = dim + g * q;
    let mut m = zeros(size, size);
    m.slice_mut(ndarray::s![..dim, ..dim]).assign(p);
    let fvals: Vec<CMat> = points
        .iter()
        .map(|&z| eval_fs(data, z))
        .collect::<Result<_>>()?;
    for (i, &zi) in points.iter().enumerate() {
        let r0 = dim + i * q;
        m.slice_mut(ndarray::s![r0..r0 + q, ..dim]).assign(&fvals[i]);
        m.slice_mut(ndarray::s![..dim, r0..r0 + q])
            .assign(&adjoint(&fvals[i]));
        for (j, &zj) in points.iter().enumerate() {
            let c0 = dim + j * q;
            let k = kernel_ks(&data.s, zi, zj)?;
            m.slice_mut(ndarray::s![r0..r0 + q, c0..c0 + q]).assign(&k);
        }
    }
    Ok(m)
}

/// Run the admissibility checks against a candidate Gram operator.
///
/// The membership condition (that `F^S` maps into the de Branges–Rovnyak
/// space with the correct Gram bound) is tested through positivity of the
/// block kernel on an interior grid; this is a numerical surrogate, recorded
/// as such, since no finite exact test exists for general `S`.
pub fn check_admissible(
    data: &AipDataSet,
    p_candidate: &CMat,
    tol: &Tolerances,
) -> Result<AdmissibilityReport> {
    let dim = data.dim();
    if p_candidate.nrows() != dim || p_candidate.ncols() != dim {
        return Err(Error::Dimension("check_admissible: P has wrong size".into()));
    }
    let rho = spectral_radius(&data.t);
    let obs_pairs_ok = rho <= 1.0 + tol.rank_tol.max(1e-8);
    let q_mat = &adjoint(&data.e).dot(&data.e) - &adjoint(&data.n).dot(&data.n);
    let stein_residual = fro_norm(
        &(p_candidate - &adjoint(&data.t).dot(p_candidate).dot(&data.t) - &q_mat),
    );
    let gram = membership_gram(data, p_candidate, &membership_grid())?;
    let verdict = psd_check(&gram, tol)?;
    // Kernel values grow like 1/(1−r²); scale the eigenvalue floor with the
    // assembled matrix so the verdict is meaningful for large data.
    let floor = tol.psd_tol * (1.0 + fro_norm(&gram));
    let psd_ok = verdict.min_eigenvalue >= -floor;
    Ok(AdmissibilityReport {
        p: p_candidate.clone(),
        stein_residual,
        obs_pairs_ok,
        fs_membership_min_eig: verdict.min_eigenvalue,
        psd_ok,
    })
}

/// Solvability verdict: the problem has a solution iff `P ⪰ xx*`.
#[derive(Debug, Clone, Copy)]
pub struct Solvability {
    pub solvable: bool,
    /// Smallest eigenvalue of `P − xx*`.
    pub margin: f64,
}

pub fn solvability(p: &CMat, x: &CVec, tol: &Tolerances) -> Result<Solvability> {
    let xc = col(x);
    let m = p - &xc.dot(&adjoint(&xc));
    let v: PsdVerdict = psd_check(&m, tol)?;
    Ok(Solvability {
        solvable: v.is_psd,
        margin: v.min_eigenvalue,
    })
}

/// Positivity test of the 3×3-block kernel
/// `[[1, x*, f(ζ)*], [x, P, F^S(ζ)*], [f(z), F^S(z), K_S(z,ζ)]]`
/// assembled over the sample points.  A Schur-class `f` with `‖f‖ ≤ 1` solves
/// the interpolation problem iff this kernel is positive on the whole bidisk;
/// the test certifies positivity over the grid.
pub fn kernel_positivity_test(
    data: &AipDataSet,
    p: &CMat,
    f: &Realization,
    points: &[Complex64],
    tol: &Tolerances,
) -> Result<(bool, f64)> {
    let dim = data.dim();
    let q = data.s.output_dim();
    if f.output_dim() != q || f.input_dim() != 1 {
        return Err(Error::Dimension(
            "kernel_positivity_test: f must be a q×1 function".into(),
        ));
    }
    let g = points.len();
    let bs = 1 + dim + q;
    let mut m = zeros(g * bs, g * bs);
    let xc = col(&data.x);
    let fvals: Vec<CMat> = points.iter().map(|&z| f.eval(z)).collect::<Result<_>>()?;
    let fsvals: Vec<CMat> = points
        .iter()
        .map(|&z| eval_fs(data, z))
        .collect::<Result<_>>()?;
    for i in 0..g {
        for j in 0..g {
            let k = kernel_ks(&data.s, points[i], points[j])?;
            let blk = block(&[
                &[&eye(1), &adjoint(&xc), &adjoint(&fvals[j])],
                &[&xc, &p.clone(), &adjoint(&fsvals[j])],
                &[&fvals[i].clone(), &fsvals[i].clone(), &k],
            ]);
            m.slice_mut(ndarray::s![i * bs..(i + 1) * bs, j * bs..(j + 1) * bs])
                .assign(&blk);
        }
    }
    let v = psd_check(&m, tol)?;
    let floor = tol.psd_tol * (1.0 + fro_norm(&m));
    Ok((v.min_eigenvalue >= -floor, v.min_eigenvalue))
}

/// Apply the interpolation functional to a stable candidate solution:
/// `Σ_n T*ⁿ E* f_n`, the left-tangential operator-argument evaluation
/// `(E*f)^{∧L}(T*)`, computed exactly from the realizations via a Sylvester
/// solve.
pub fn interp_functional(data: &AipDataSet, f: &Realization) -> Result<CVec> {
    if !f.is_stable() {
        return Err(Error::Domain("interp_functional: f must be stable".into()));
    }
    if !data.is_strictly_stable() {
        return Err(Error::Domain(
            "interp_functional: requires ρ(T) < 1".into(),
        ));
    }
    if f.output_dim() != data.s.output_dim() || f.input_dim() != 1 {
        return Err(Error::Dimension(
            "interp_functional: f must be a q×1 function".into(),
        ));
    }
    let ts = adjoint(&data.t);
    let es = adjoint(&data.e);
    // Σ_{n≥1} T*ⁿ E* C A^{n−1} B = T* Z B with Z − T* Z A = E* C.
    let z = solve_displacement(&ts, &f.a, &es.dot(&f.c))?;
    let total = &es.dot(&f.d) + &ts.dot(&z).dot(&f.b);
    Ok(total.column(0).to_owned())
}

/// Möbius change of variable moving interpolation data around the disk:
/// `Ẽ = √(1−|ω|²)·E(I−ωT)⁻¹`, `Ñ` likewise, `T̃ = (ω̄I−T)(I−ωT)⁻¹`, and
/// `S̃(z) = S(ψ_ω(z))` with the self-inverse automorphism
/// `ψ_ω(z) = (ω−z)/(1−zω̄)` (which swaps 0 and ω); the target `x` is
/// unchanged.  A function `f` solves the original problem iff `f∘ψ_ω` solves
/// the transformed one, and applying the transform twice with the same ω
/// restores the original data.
pub fn mobius_transform(data: &AipDataSet, omega: Complex64, tol: &Tolerances) -> Result<AipDataSet> {
    if omega.norm() >= 1.0 {
        return Err(Error::Domain("mobius_transform: |ω| must be < 1".into()));
    }
    let dim = data.dim();
    let i = eye(dim);
    let m = &i - &data.t.mapv(|v| v * omega);
    let m_inv = lin_solve(&m, &i)
        .map_err(|_| Error::Singular("mobius_transform: I−ωT singular".into()))?;
    let scale_f = Complex64::new((1.0 - omega.norm_sqr()).sqrt(), 0.0);
    let e_new = data.e.dot(&m_inv).mapv(|v| v * scale_f);
    let n_new = data.n.dot(&m_inv).mapv(|v| v * scale_f);
    let t_new = (&i.mapv(|v| v * omega.conj()) - &data.t).dot(&m_inv);
    // S∘ψ_ω with ψ_ω(z) = (ω−z)/(1−zω̄) = −φ_ω(z): reflect the argument
    // (A ↦ −A, C ↦ −C gives R(−z)) and then compose with φ_ω.
    let sr = &data.s.realization;
    let reflected = Realization::new(
        sr.a.mapv(|v| -v),
        sr.b.clone(),
        sr.c.mapv(|v| -v),
        sr.d.clone(),
    )?;
    let s_new = certify_schur_default(reflected.compose_mobius(omega)?, tol);
    AipDataSet::new(s_new, t_new, e_new, n_new, data.x.clone(), tol)
}

/// Convenience: scalar 1×1 data-set builder used in tests and examples.
pub fn scalar_data(
    s: SchurFunction,
    t: Complex64,
    e: Complex64,
    n: Complex64,
    x: Complex64,
    tol: &Tolerances,
) -> Result<AipDataSet> {
    AipDataSet::new(
        s,
        scalar(t),
        scalar(e),
        scalar(n),
        ndarray::Array1::from_elem(1, x),
        tol,
    )
}
