//! Model spaces of rational inner functions and the intersection space
//! `M_{S,B} = H(K_S) ∩ B·H²`.
//!
//! For a finite Blaschke product `B` the model space `K_B = H² ⊖ B·H²` is
//! finite dimensional.  With `T` the backward shift and `E` evaluation at 0
//! on `K_B`, and `N : h ↦ Σ_j S_j* h_j`, the homogeneous data set
//! `{S, T, E, N, x = 0}` is admissible and its solution set is exactly
//! `M_{S,B}`.  Running that data set through the colligation machinery and
//! recovering the parameter `𝓔` for `S` yields the explicit description
//! `M_{S,B} = G·H(K_𝓔)` with `G = Σ₁₂(I−𝓔Σ₂₂)⁻¹`, and multiplication by `G`
//! is unitary from `H(K_𝓔)` onto `M_{S,B}` when `S` is inner.

use num_complex::Complex64;

use crate::aipdata::{check_admissible, AipDataSet};
use crate::numlin::{adjoint, eigenvalues, eye, scalar, solve_stein, zeros, Tolerances};
use crate::oap::build_n;
use crate::rational::{Realization, SchurFunction};
use crate::redheffer::{
    build_colligation, compute_g_gamma, recover_parameter, ColligationDims, Parameter,
    RedhefferColligation, SigmaFunction,
};
use crate::{CMat, CVec, Error, Result};

/// The model space `K_B` of a scalar inner function, with the operators
/// `T` (backward shift) and `E` (evaluation at 0) in an orthonormal basis.
#[derive(Debug, Clone)]
pub struct ModelSpace {
    /// Orthonormal (Takenaka–Malmquist) basis functions, one per zero of `B`.
    pub basis: Vec<Realization>,
    /// Backward shift `h ↦ (h − h(0))/z` on `K_B` in the basis.
    pub t: CMat,
    /// Evaluation `h ↦ h(0)` as a `1 × d` row.
    pub e: CMat,
}

fn backward_shift(f: &Realization) -> Result<Realization> {
    // (h − h(0))/z for h(z) = d + zc(I−za)⁻¹b has realization (a, b, ca, cb).
    Ok(Realization::new(
        f.a.clone(),
        f.b.clone(),
        f.c.dot(&f.a),
        f.c.dot(&f.b),
    )?)
}

/// Build `K_B` for a certified-inner scalar `B` of finite degree.
///
/// The basis is the Takenaka–Malmquist system attached to the zeros of `B`
/// (eigenvalue conjugates of the realization's state matrix, sorted
/// deterministically), so the construction is reproducible up to that fixed
/// ordering.
pub fn model_space(b: &SchurFunction, tol: &Tolerances) -> Result<ModelSpace> {
    if b.input_dim() != 1 || b.output_dim() != 1 {
        return Err(Error::Precondition(
            "model_space: B must be scalar-valued".into(),
        ));
    }
    if b.certified_inner.is_none() {
        return Err(Error::Precondition(
            "model_space: B must carry an inner certificate".into(),
        ));
    }
    let mut zeros_list: Vec<Complex64> = eigenvalues(&b.realization.a)
        .into_iter()
        .map(|l| l.conj())
        .collect();
    for w in &zeros_list {
        if w.norm() >= 1.0 - 1e-12 {
            return Err(Error::Domain(format!(
                "model_space: zero {w} of B not strictly inside the disk"
            )));
        }
    }
    zeros_list.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
    let d = zeros_list.len();

    let mut basis = Vec::with_capacity(d);
    let mut prod = Realization::constant(scalar(Complex64::new(1.0, 0.0)));
    for &w in &zeros_list {
        // Szegő kernel factor √(1−|w|²)/(1−w̄z) …
        let szego = Realization::new(
            scalar(w.conj()),
            scalar(w.conj()),
            scalar(Complex64::new(1.0, 0.0)),
            scalar(Complex64::new(1.0, 0.0)),
        )?
        .scale(Complex64::new((1.0 - w.norm_sqr()).sqrt(), 0.0));
        basis.push(szego.mul(&prod)?);
        // … times the Blaschke factors of the previously used zeros.
        let factor = Realization::new(
            scalar(w.conj()),
            scalar(Complex64::new(1.0, 0.0)),
            scalar(Complex64::new(1.0 - w.norm_sqr(), 0.0)),
            scalar(-w),
        )?;
        prod = prod.mul(&factor)?;
    }

    let mut e = zeros(1, d);
    let mut t = zeros(d, d);
    for (k, phi) in basis.iter().enumerate() {
        e[(0, k)] = phi.eval(Complex64::new(0.0, 0.0))?[(0, 0)];
        let shifted = backward_shift(phi)?;
        for (l, psi) in basis.iter().enumerate() {
            t[(l, k)] = crate::rational::h2_inner_product(&shifted, psi)?;
        }
    }
    // Orthonormality of the basis, as a construction self-check.
    for (k, f) in basis.iter().enumerate() {
        for (l, g) in basis.iter().enumerate() {
            let ip = crate::rational::h2_inner_product(f, g)?;
            let expect = if k == l { 1.0 } else { 0.0 };
            if (ip - Complex64::new(expect, 0.0)).norm() > 1e3 * tol.residual_tol {
                return Err(Error::Internal(format!(
                    "model_space: basis Gram defect {:.3e} at ({k},{l})",
                    (ip - Complex64::new(expect, 0.0)).norm()
                )));
            }
        }
    }
    if crate::numlin::spectral_radius(&t) >= 1.0 {
        return Err(Error::Internal("model_space: T not strictly stable".into()));
    }
    Ok(ModelSpace { basis, t, e })
}

/// The intersection space `M_{S,B} = H(K_S) ∩ B·H²` in its explicit form
/// `G·H(K_𝓔)`.
pub struct IntersectionSpace {
    /// Model space of `B` that carries the homogeneous data.
    pub model: ModelSpace,
    /// The admissible homogeneous data set `{S, T, E, N, x = 0}`.
    pub data: AipDataSet,
    /// `P = I − P_{K_B} M_S M_S*|_{K_B}` in the model basis.
    pub p: CMat,
    /// Colligation built from `{P, T, E, N}`.
    pub col: RedhefferColligation,
    /// Parameter with `S = R_Σ[𝓔]`.
    pub param: Parameter,
    /// Worst re-application residual of the parameter recovery.
    pub recovery_worst: f64,
}

impl IntersectionSpace {
    pub fn dims(&self) -> &ColligationDims {
        &self.col.dims
    }

    pub fn sigma(&self) -> Result<SigmaFunction> {
        self.col.sigma()
    }

    /// `G(z) = Σ₁₂(z)(I − 𝓔(z)Σ₂₂(z))⁻¹`, a `q × dim Δ̃*` matrix.
    pub fn g_eval(&self, z: Complex64) -> Result<CMat> {
        Ok(compute_g_gamma(&self.col, &self.param, z)?.0)
    }

    /// `K_𝓔(z,ζ) = (I − 𝓔(z)𝓔(ζ)*)/(1 − zζ̄)`.
    pub fn kernel_param(&self, z: Complex64, zeta: Complex64) -> Result<CMat> {
        let ez = self.param.eval(z, &self.col.dims)?;
        let ezeta = self.param.eval(zeta, &self.col.dims)?;
        let ds = self.col.dims.delta_star;
        let denom = Complex64::new(1.0, 0.0) - z * zeta.conj();
        if denom.norm() < 1e-14 {
            return Err(Error::Domain(format!(
                "kernel_param: 1 − zζ̄ vanishes at z={z}, ζ={zeta}"
            )));
        }
        Ok((&eye(ds) - &ez.dot(&adjoint(&ezeta))).mapv(|v| v / denom))
    }

    /// Value at `z` of the element `G·K_𝓔(·,ζ)c` of `M_{S,B}`.
    pub fn element(&self, z: Complex64, zeta: Complex64, coeff: &CVec) -> Result<CVec> {
        let g = self.g_eval(z)?;
        let k = self.kernel_param(z, zeta)?;
        Ok(g.dot(&k.dot(&crate::numlin::col(coeff)))
            .column(0)
            .to_owned())
    }

    /// Numerical dimension of `H(K_𝓔)` — and hence of `M_{S,B}` — as the
    /// rank of the kernel Gram matrix over an interior sample grid.  Exact
    /// for inner parameters of modest degree (the finite-dimensional case);
    /// for non-inner parameters the space is infinite dimensional and the
    /// returned value is only a lower bound limited by the grid size.
    pub fn parameter_space_dim(&self, tol: &Tolerances) -> Result<usize> {
        let ds = self.col.dims.delta_star;
        if ds == 0 {
            return Ok(0);
        }
        let pts: Vec<Complex64> = (0..24)
            .map(|k| Complex64::from_polar(0.25 + 0.02 * (k as f64), 0.77 * k as f64))
            .collect();
        let n = pts.len() * ds;
        let mut gram = zeros(n, n);
        for (i, &zi) in pts.iter().enumerate() {
            for (j, &zj) in pts.iter().enumerate() {
                let k = self.kernel_param(zi, zj)?;
                for r in 0..ds {
                    for c in 0..ds {
                        gram[(i * ds + r, j * ds + c)] = k[(r, c)];
                    }
                }
            }
        }
        // The Gram of kernel sections is PSD with rank = dim of their span.
        // Genuine kernel sections have norms of order 1, so an absolute floor
        // (in addition to the relative one) keeps recovery noise from
        // inflating the rank when the kernel is numerically zero.
        let sv = crate::numlin::singular_values(&gram);
        let smax = sv.first().copied().unwrap_or(0.0);
        let cutoff = (tol.rank_tol.max(1e-7) * smax).max(1e-5);
        Ok(sv.iter().filter(|&&v| v >= cutoff).count())
    }
}

/// Assemble `M_{S,B}` for a rational Schur `S` and certified-inner scalar
/// `B`: builds the homogeneous data, verifies admissibility, constructs the
/// colligation, and recovers the parameter `𝓔` with `S = R_Σ[𝓔]`.
pub fn intersection_space(
    s: &SchurFunction,
    b: &SchurFunction,
    tol: &Tolerances,
) -> Result<IntersectionSpace> {
    if s.input_dim() != 1 || s.output_dim() != 1 {
        return Err(Error::Precondition(
            "intersection_space: S must be scalar-valued".into(),
        ));
    }
    let model = model_space(b, tol)?;
    let d = model.t.nrows();
    let n = build_n(s, &model.e, &model.t)?;
    let rhs = &adjoint(&model.e).dot(&model.e) - &adjoint(&n).dot(&n);
    let p = solve_stein(&model.t, &rhs, tol)?;
    let data = AipDataSet::new(
        s.clone(),
        model.t.clone(),
        model.e.clone(),
        n,
        ndarray::Array1::zeros(d),
        tol,
    )?;
    let report = check_admissible(&data, &p, tol)?;
    if !report.is_admissible(tol) {
        return Err(Error::NotAdmissible(format!(
            "intersection_space: homogeneous data failed admissibility: {report:?}"
        )));
    }
    let col = build_colligation(&p, &data.t, &data.e, &data.n, tol)?;
    let (param, recovery_worst) = if col.dims.delta == 0 || col.dims.delta_star == 0 {
        (Parameter::Zero, 0.0)
    } else {
        let sigma = col.sigma()?;
        let sample_points: Vec<Complex64> = (0..12)
            .map(|k| Complex64::from_polar(0.35 + 0.04 * (k % 5) as f64, 0.67 * k as f64))
            .collect();
        let (param, _, worst) =
            recover_parameter(&sigma, &s.realization, &sample_points, 1e-6, tol)?;
        (param, worst)
    };
    Ok(IntersectionSpace {
        model,
        data,
        p,
        col,
        param,
        recovery_worst,
    })
}
