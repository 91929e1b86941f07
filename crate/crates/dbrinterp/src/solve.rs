//! Solution machinery for the norm-constrained interpolation problem.
//!
//! Three layers:
//!
//! * the finite-dimensional Douglas parametrization of all contractive
//!   solutions of `AX = B`,
//! * the invertible-`P` route: `f = F^S P⁻¹x + h` with the homogeneous part
//!   ranging over the ball of the reduced-kernel space,
//! * the colligation route: `f(z) = Γ(z)x̃ + G(z)h(z)` with `h` a free
//!   parameter in the ball of `H(K_𝓔)`, together with the uniqueness
//!   classification.

use num_complex::Complex64;

use crate::aipdata::{eval_fs, AipDataSet};
use crate::numlin::{
    adjoint, col as colvec, eye, fro_norm, lin_solve, op_norm, pinv, psd_check, sqrt_psd,
    vec_norm, Tolerances,
};
#[cfg(test)]
use crate::numlin::zeros;
use crate::rational::{h2_norm, kernel_ks, Realization};
use crate::redheffer::{
    compute_g_gamma, recover_parameter, ColligationDims, Parameter, RedhefferColligation,
};
use crate::{CMat, CVec, Error, Result};

// ---------------------------------------------------------------------------
// Douglas parametrization
// ---------------------------------------------------------------------------

/// The factored form of all contractive solutions of `AX = B`:
/// `X = X₂*X₁ + (I−X₂*X₂)^½ K (I−X₁*X₁)^½` over contractions `K`.
#[derive(Debug, Clone)]
pub struct DouglasParametrization {
    /// `(AA*)^½ X₁ = B`.
    pub x1: CMat,
    /// `(AA*)^½ X₂ = A` (a coisometry onto the range of `A`).
    pub x2: CMat,
    /// `(I − X₂*X₂)^½`.
    pub defect_left: CMat,
    /// `(I − X₁*X₁)^½`.
    pub defect_right: CMat,
    /// The minimal-norm solution `X₂*X₁` (the `K = 0` member).
    pub minimal: CMat,
    /// Solution is unique (defect factors numerically zero on one side).
    pub unique: bool,
}

/// Factor the solution set of `AX = B` over contractions.
///
/// Solvable with a contraction iff `AA* ⪰ BB*`; otherwise the error carries
/// the violation margin.
pub fn douglas_parametrize(a: &CMat, b: &CMat, tol: &Tolerances) -> Result<DouglasParametrization> {
    if a.nrows() != b.nrows() {
        return Err(Error::Dimension(format!(
            "douglas: A has {} rows, B has {}",
            a.nrows(),
            b.nrows()
        )));
    }
    let gap = &a.dot(&adjoint(a)) - &b.dot(&adjoint(b));
    let verdict = psd_check(&gap, tol)?;
    if !verdict.is_psd {
        return Err(Error::Unsolvable {
            margin: verdict.min_eigenvalue,
        });
    }
    // Work from the SVD A = UΣV* rather than from (AA*)^½ so small singular
    // values are not squared: X₂ = (AA*)^{½⁺}A = U_r V_r* (a partial
    // isometry) and X₁ = UΣ⁺U*B.
    let (u, svals, v) = crate::numlin::svd_full(a);
    let smax = svals.first().copied().unwrap_or(0.0);
    let rank = svals
        .iter()
        .filter(|&&sv| smax > 0.0 && sv >= tol.rank_tol * smax)
        .count();
    let u_r = u.slice(ndarray::s![.., ..rank]).to_owned();
    let v_r = v.slice(ndarray::s![.., ..rank]).to_owned();
    let x2 = u_r.dot(&adjoint(&v_r));
    let mut ut_b = adjoint(&u_r).dot(b);
    for (i, mut row) in ut_b.rows_mut().into_iter().enumerate() {
        let inv_s = Complex64::new(1.0 / svals[i], 0.0);
        for val in row.iter_mut() {
            *val *= inv_s;
        }
    }
    let x1 = u_r.dot(&ut_b);
    // X₂*X₂ is the projection onto the row space of A, so (I−X₂*X₂)^½ is
    // exactly the projection onto Ker A.
    let ker_a = v.slice(ndarray::s![.., rank..]).to_owned();
    let defect_left = ker_a.dot(&adjoint(&ker_a));
    let defect_right = sqrt_psd(
        &(&eye(x1.ncols()) - &adjoint(&x1).dot(&x1)),
        &Tolerances {
            psd_tol: tol.psd_tol.max(1e-7),
            ..*tol
        },
    )?;
    let minimal = adjoint(&x2).dot(&x1);
    let unique = fro_norm(&defect_left) <= tol.psd_tol.max(1e-7).sqrt()
        || fro_norm(&defect_right) <= tol.psd_tol.max(1e-7).sqrt();
    Ok(DouglasParametrization {
        x1,
        x2,
        defect_left,
        defect_right,
        minimal,
        unique,
    })
}

impl DouglasParametrization {
    /// The solution associated with a contraction parameter `K`.
    pub fn apply(&self, k: &CMat) -> Result<CMat> {
        if k.nrows() != self.defect_left.nrows() || k.ncols() != self.defect_right.nrows() {
            return Err(Error::Dimension(format!(
                "douglas parameter must be {}x{}, got {}x{}",
                self.defect_left.nrows(),
                self.defect_right.nrows(),
                k.nrows(),
                k.ncols()
            )));
        }
        Ok(&self.minimal + &self.defect_left.dot(k).dot(&self.defect_right))
    }
}

/// One-shot Douglas solve: `K = 0` gives the minimal-norm solution.
pub fn douglas_solve(a: &CMat, b: &CMat, k: &CMat, tol: &Tolerances) -> Result<CMat> {
    let par = douglas_parametrize(a, b, tol)?;
    if op_norm(k) > 1.0 + tol.psd_tol.max(1e-9) {
        return Err(Error::Precondition(format!(
            "douglas parameter must be a contraction, ‖K‖ = {}",
            op_norm(k)
        )));
    }
    let x = par.apply(k)?;
    let resid = fro_norm(&(&a.dot(&x) - b));
    if resid > tol.residual_tol.max(1e-8) * (1.0 + fro_norm(b)) {
        return Err(Error::Internal(format!(
            "douglas solve residual {resid:.3e}"
        )));
    }
    Ok(x)
}

// ---------------------------------------------------------------------------
// Invertible-P route
// ---------------------------------------------------------------------------

/// Output of the invertible-`P` route: the particular solution and the
/// reduced kernel of the homogeneous space.
pub struct InverseRoute {
    /// `f_min(z) = F^S(z) P⁻¹ x` as a realization (state matrix `T`).
    pub f_min: Realization,
    /// Norm budget for the homogeneous part: `√(1 − x*P⁻¹x)`, clamped at 0.
    pub budget: f64,
    /// The problem has exactly one solution in the ball.
    pub unique: bool,
    data: AipDataSet,
    p_inv: CMat,
}

impl InverseRoute {
    /// Reduced kernel `K̃(z,ζ) = K_S(z,ζ) − F^S(z) P⁻¹ F^S(ζ)*` of the
    /// homogeneous solution space.
    pub fn ktilde(&self, z: Complex64, zeta: Complex64) -> Result<CMat> {
        let ks = kernel_ks(&self.data.s, z, zeta)?;
        let fz = eval_fs(&self.data, z)?;
        let fzeta = eval_fs(&self.data, zeta)?;
        Ok(&ks - &fz.dot(&self.p_inv).dot(&adjoint(&fzeta)))
    }
}

/// Solve through `P⁻¹` when `P` is positive definite:
/// every solution is `F^S P⁻¹x + h` with `h` in the ball of radius
/// `√(1−x*P⁻¹x)` of the space with reproducing kernel `K̃`.
pub fn solve_inverse_route(data: &AipDataSet, p: &CMat, tol: &Tolerances) -> Result<InverseRoute> {
    let verdict = psd_check(p, tol)?;
    if !verdict.is_psd || verdict.min_eigenvalue < tol.psd_tol {
        return Err(Error::Domain(format!(
            "inverse route unavailable: min eig P = {:.3e} (use the colligation route)",
            verdict.min_eigenvalue
        )));
    }
    let dim = data.dim();
    let p_inv = lin_solve(p, &eye(dim))?;
    let v = p_inv.dot(&colvec(&data.x));
    // f_min = E(I−zT)⁻¹v − S(z)·N(I−zT)⁻¹v, assembled by realization algebra.
    let term1 = Realization::observer(&data.e, &data.t, &v)?;
    let term2 = data
        .s
        .realization
        .mul(&Realization::observer(&data.n, &data.t, &v)?)?;
    let f_min = term1.sub(&term2)?;
    let xc = colvec(&data.x);
    let energy = adjoint(&xc).dot(&p_inv).dot(&xc)[(0, 0)].re;
    let budget = (1.0 - energy).max(0.0).sqrt();
    if energy > 1.0 + tol.psd_tol.max(1e-8) {
        return Err(Error::Unsolvable {
            margin: 1.0 - energy,
        });
    }
    let unique = budget <= tol.psd_tol.sqrt();
    Ok(InverseRoute {
        f_min,
        budget,
        unique,
        data: data.clone(),
        p_inv,
    })
}

// ---------------------------------------------------------------------------
// Colligation route
// ---------------------------------------------------------------------------

/// Uniqueness classification of the solution set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Uniqueness {
    /// `‖x̃‖ = 1`: the norm budget is zero.
    UniqueByBudget,
    /// The homogeneous space is trivial (`dim Δ* = 0`, or the supplied
    /// parameter is a coisometric constant so `H(K_𝓔) = {0}`).
    UniqueByDenseRange,
    NonUnique,
}

/// Which degenerate shape the colligation has.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseTag {
    /// `dim Δ* = 0`: single solution `C₁(I−zA)⁻¹x̃`.
    DeltaStarTrivial,
    /// `dim Δ = 0`: the parameter space is a full vector Hardy space.
    DeltaTrivial,
    General,
}

/// The parametrized solution family `f(z) = Γ(z)x̃ + G(z)h(z)`.
pub struct SolutionFamily {
    /// Coordinates of `x̃` in the stored `X₀` basis (`x = P^½x̃`).
    pub x_tilde: CVec,
    /// `√(1 − ‖x̃‖²)`, clamped at 0.
    pub budget: f64,
    pub uniqueness: Uniqueness,
    pub case_tag: CaseTag,
    /// The colligation the family lives on.
    pub col: RedhefferColligation,
    /// The Schur-class parameter `𝓔` with `S = R_Σ[𝓔]`.
    pub param: Parameter,
    /// The free parameter `h` (dim Δ̃* × 1), `None` meaning `h ≡ 0`.
    pub h: Option<Realization>,
}

impl SolutionFamily {
    /// Evaluate the solution at `z`.
    pub fn eval(&self, z: Complex64) -> Result<CMat> {
        let (g, gamma) = compute_g_gamma(&self.col, &self.param, z)?;
        let mut out = gamma.dot(&colvec(&self.x_tilde));
        if let Some(h) = &self.h {
            out = &out + &g.dot(&h.eval(z)?);
        }
        Ok(out)
    }

    /// `Γ(z)` for this family's parameter.
    pub fn gamma(&self, z: Complex64) -> Result<CMat> {
        Ok(compute_g_gamma(&self.col, &self.param, z)?.1)
    }

    /// `G(z)` for this family's parameter.
    pub fn g_mult(&self, z: Complex64) -> Result<CMat> {
        Ok(compute_g_gamma(&self.col, &self.param, z)?.0)
    }
}

/// Coordinates of `x̃` with `x = P^½x̃`, `x̃ ∈ X₀`, plus the membership
/// residual `‖P^½X₀ξ − x‖`.
pub fn x_tilde_coords(col: &RedhefferColligation, x: &CVec, tol: &Tolerances) -> Result<CVec> {
    let map = col.p_half.dot(&col.x0_basis);
    let xi_mat = pinv(&map, tol).dot(&colvec(x));
    let xi: CVec = xi_mat.column(0).to_owned();
    let resid = vec_norm(&(&map.dot(&xi_mat).column(0).to_owned() - x));
    let scale = vec_norm(x).max(tol.rank_tol);
    if resid > tol.rank_tol.max(1e-8).sqrt() * scale {
        return Err(Error::Unsolvable {
            margin: -(resid / scale),
        });
    }
    Ok(xi)
}

/// Classify uniqueness from the budget, the defect dimensions, and the
/// supplied parameter.
pub fn classify_uniqueness(
    dims: &ColligationDims,
    x_tilde: &CVec,
    param: &Parameter,
    tol: &Tolerances,
) -> (Uniqueness, CaseTag) {
    let case_tag = if dims.delta_star == 0 {
        CaseTag::DeltaStarTrivial
    } else if dims.delta == 0 {
        CaseTag::DeltaTrivial
    } else {
        CaseTag::General
    };
    let norm = vec_norm(x_tilde);
    let uniqueness = if (norm - 1.0).abs() <= tol.psd_tol.max(1e-9).sqrt() {
        Uniqueness::UniqueByBudget
    } else if dims.delta_star == 0 || param_is_coisometric_constant(param, dims, tol) {
        Uniqueness::UniqueByDenseRange
    } else {
        Uniqueness::NonUnique
    };
    (uniqueness, case_tag)
}

/// A constant parameter with `𝓔𝓔* = I` makes `K_𝓔 ≡ 0`, so the free
/// parameter space `H(K_𝓔)` collapses to `{0}` (the extremal case).
fn param_is_coisometric_constant(param: &Parameter, dims: &ColligationDims, tol: &Tolerances) -> bool {
    if dims.delta_star == 0 {
        return true;
    }
    match param {
        Parameter::Zero => false,
        Parameter::Fun(r) => {
            if r.state_dim() != 0 {
                return false;
            }
            let e = &r.d;
            fro_norm(&(&e.dot(&adjoint(e)) - &eye(dims.delta_star)))
                <= tol.residual_tol.max(1e-8).sqrt()
        }
    }
}

/// Solve the interpolation problem on a built colligation with an explicit
/// Schur-class parameter `𝓔` (satisfying `S = R_Σ[𝓔]` for the data's `S`)
/// and a free parameter `h` in the ball of `H(K_𝓔)`.
///
/// `h = None` yields the minimal-norm solution `Γx̃`.  The norm of `h` is
/// verified against the budget when computable (`𝓔 ≡ 0` or `𝓔` inner, where
/// `H(K_𝓔) ⊂ H²` contractively); otherwise it is accepted as
/// caller-certified.
pub fn aip_solve_with_param(
    data: &AipDataSet,
    col: &RedhefferColligation,
    param: Parameter,
    h: Option<Realization>,
    tol: &Tolerances,
) -> Result<SolutionFamily> {
    let x_tilde = x_tilde_coords(col, &data.x, tol)?;
    let norm = vec_norm(&x_tilde);
    if norm > 1.0 + tol.psd_tol.max(1e-8).sqrt() {
        return Err(Error::Unsolvable {
            margin: 1.0 - norm * norm,
        });
    }
    let budget = (1.0 - norm * norm).max(0.0).sqrt();
    if let Some(hf) = &h {
        if hf.output_dim() != col.dims.delta_star || hf.input_dim() != 1 {
            return Err(Error::Dimension(format!(
                "h must be {}×1, got {}×{}",
                col.dims.delta_star,
                hf.output_dim(),
                hf.input_dim()
            )));
        }
        if let Parameter::Zero = param {
            // H(K_𝓔) = H² of Δ̃*: the norm is exactly computable.
            let hn = h2_norm(hf)?;
            if hn > budget + tol.psd_tol.max(1e-8).sqrt() {
                return Err(Error::Domain(format!(
                    "parameter norm ‖h‖ = {hn:.6} exceeds the budget {budget:.6}"
                )));
            }
        }
    }
    let (uniqueness, case_tag) = classify_uniqueness(&col.dims, &x_tilde, &param, tol);
    Ok(SolutionFamily {
        x_tilde,
        budget,
        uniqueness,
        case_tag,
        col: col.clone(),
        param,
        h,
    })
}

/// Solve the interpolation problem: recover the parameter `𝓔` matching the
/// data's `S` from the Redheffer transform, then build the solution family.
pub fn aip_solve(
    data: &AipDataSet,
    col: &RedhefferColligation,
    h: Option<Realization>,
    tol: &Tolerances,
) -> Result<SolutionFamily> {
    let sigma = col.sigma()?;
    let sample_points: Vec<Complex64> = (0..12)
        .map(|k| Complex64::from_polar(0.35 + 0.04 * (k % 5) as f64, 0.67 * k as f64))
        .collect();
    let param = if col.dims.delta == 0 || col.dims.delta_star == 0 {
        Parameter::Zero
    } else {
        let (p, _, _) = recover_parameter(
            &sigma,
            &data.s.realization,
            &sample_points,
            1e-6,
            tol,
        )?;
        p
    };
    aip_solve_with_param(data, col, param, h, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aipdata::{compute_p_oap, interp_functional, scalar_data, solvability};
    use crate::numlin::scalar;
    use crate::rational::certify_schur_default;
    use crate::redheffer::build_colligation;
    use ndarray::Array1;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_cmat(rng: &mut ChaCha8Rng, r: usize, cdim: usize) -> CMat {
        ndarray::Array2::from_shape_fn((r, cdim), |_| {
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    fn szego_data(tol: &Tolerances) -> AipDataSet {
        let s = certify_schur_default(Realization::zero(1, 1), tol);
        scalar_data(s, c(0.5, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), tol).unwrap()
    }

    #[test]
    fn douglas_identity_a() {
        let tol = Tolerances::default();
        let b = scalar(c(0.5, 0.3));
        let par = douglas_parametrize(&eye(1), &b, &tol).unwrap();
        assert!(par.unique);
        assert!(fro_norm(&(&par.minimal - &b)) < 1e-10);
    }

    #[test]
    fn douglas_row_case_sweeps_solutions() {
        let tol = Tolerances::default();
        // A = [1, 0] (1×2), B = 0: solutions X = [0; k], |k| ≤ 1.
        let a = ndarray::array![[c(1.0, 0.0), c(0.0, 0.0)]];
        let b = zeros(1, 1);
        let par = douglas_parametrize(&a, &b, &tol).unwrap();
        assert!(!par.unique);
        for kval in [-1.0, -0.5, 0.0, 0.3, 1.0] {
            let k = ndarray::Array2::from_shape_fn((2, 1), |(i, _)| {
                if i == 1 {
                    c(kval, 0.0)
                } else {
                    c(0.7, 0.0) // first row multiplies a zero defect direction
                }
            });
            let x = par.apply(&k).unwrap();
            assert!(fro_norm(&a.dot(&x)) < 1e-9);
            assert!((x[(1, 0)].re - kval).abs() < 1e-9);
            assert!(x[(0, 0)].norm() < 1e-9);
        }
    }

    #[test]
    fn douglas_degenerate_zero() {
        let tol = Tolerances::default();
        let x = douglas_solve(&zeros(1, 1), &zeros(1, 1), &zeros(1, 1), &tol).unwrap();
        assert!(fro_norm(&x) < 1e-12);
    }

    #[test]
    fn douglas_unsolvable() {
        let tol = Tolerances::default();
        let a = scalar(c(0.5, 0.0));
        let b = scalar(c(2.0, 0.0));
        assert!(matches!(
            douglas_parametrize(&a, &b, &tol),
            Err(Error::Unsolvable { .. })
        ));
    }

    #[test]
    fn douglas_random_sweep() {
        let tol = Tolerances::default();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..20 {
            let m = rng.gen_range(1..=6);
            let na = rng.gen_range(1..=6);
            let nb = rng.gen_range(1..=6);
            let a = random_cmat(&mut rng, m, na);
            // B = A·X₀ with a strict contraction X₀ guarantees AA* ⪰ BB*.
            let mut x0 = random_cmat(&mut rng, na, nb);
            let nx = op_norm(&x0);
            if nx > 0.0 {
                x0 = x0.mapv(|v| v * (0.9 / nx.max(1.0)));
            }
            let b = a.dot(&x0);
            let par = douglas_parametrize(&a, &b, &tol).unwrap();
            // K = 0 member solves and is minimal on random vectors
            let xmin = par.apply(&zeros(na, nb)).unwrap();
            assert!(fro_norm(&(&a.dot(&xmin) - &b)) < 1e-8 * (1.0 + fro_norm(&b)));
            assert!(op_norm(&xmin) <= 1.0 + 1e-9);
            let mut k = random_cmat(&mut rng, na, nb);
            let nk = op_norm(&k);
            if nk > 1.0 {
                k = k.mapv(|v| v / nk);
            }
            let xk = par.apply(&k).unwrap();
            assert!(fro_norm(&(&a.dot(&xk) - &b)) < 1e-8 * (1.0 + fro_norm(&b)));
            assert!(op_norm(&xk) <= 1.0 + 1e-7);
            for _ in 0..5 {
                let v = random_cmat(&mut rng, nb, 1);
                let nmin = fro_norm(&xmin.dot(&v));
                let nk2 = fro_norm(&xk.dot(&v));
                assert!(nmin <= nk2 + 1e-7, "minimality violated: {nmin} > {nk2}");
            }
        }
    }

    #[test]
    fn inverse_route_szego() {
        let tol = Tolerances::default();
        let data = szego_data(&tol);
        let p = compute_p_oap(&data, &tol).unwrap();
        let route = solve_inverse_route(&data, &p, &tol).unwrap();
        // f_min(z) = (3/4)/(1−z/2), budget 1/2
        for k in 0..10 {
            let z = Complex64::from_polar(0.08 * k as f64, 0.9 * k as f64);
            let expect = c(0.75, 0.0) / (c(1.0, 0.0) - z * 0.5);
            let got = route.f_min.eval(z).unwrap()[(0, 0)];
            assert!((got - expect).norm() < 1e-12);
        }
        assert!((route.budget - 0.5).abs() < 1e-12);
        // K̃ PSD on a small grid
        let pts = [c(0.1, 0.2), c(-0.4, 0.1), c(0.3, -0.3)];
        for &z in &pts {
            let k = route.ktilde(z, z).unwrap();
            assert!(k[(0, 0)].re >= -1e-10);
        }
        // and the closed form 1/(1−zζ̄) − (3/4)/((1−z/2)(1−ζ̄/2))
        let (z, w) = (c(0.3, 0.1), c(-0.2, 0.4));
        let expect = c(1.0, 0.0) / (c(1.0, 0.0) - z * w.conj())
            - c(0.75, 0.0) / ((c(1.0, 0.0) - z * 0.5) * (c(1.0, 0.0) - w.conj() * 0.5));
        let got = route.ktilde(z, w).unwrap()[(0, 0)];
        assert!((got - expect).norm() < 1e-12);
    }

    #[test]
    fn inverse_route_zero_target() {
        let tol = Tolerances::default();
        let mut data = szego_data(&tol);
        data.x = Array1::from_elem(1, c(0.0, 0.0));
        let p = compute_p_oap(&data, &tol).unwrap();
        let route = solve_inverse_route(&data, &p, &tol).unwrap();
        assert!((route.budget - 1.0).abs() < 1e-12);
        assert!(fro_norm(&route.f_min.eval(c(0.3, 0.2)).unwrap()) < 1e-12);
    }

    #[test]
    fn route_equivalence_szego() {
        let tol = Tolerances::default();
        let data = szego_data(&tol);
        let p = compute_p_oap(&data, &tol).unwrap();
        let route = solve_inverse_route(&data, &p, &tol).unwrap();
        let col = build_colligation(&p, &data.t, &data.e, &data.n, &tol).unwrap();
        let fam = aip_solve(&data, &col, None, &tol).unwrap();
        for k in 0..20 {
            let z = Complex64::from_polar(0.88 * (k as f64) / 20.0, 1.3 * k as f64);
            let a = route.f_min.eval(z).unwrap();
            let b = fam.eval(z).unwrap();
            assert!(fro_norm(&(&a - &b)) < 1e-9, "mismatch at {z}: {a} vs {b}");
        }
        assert!((fam.budget - 0.5).abs() < 1e-9);
    }

    #[test]
    fn interp_residual_on_solutions() {
        let tol = Tolerances::default();
        let data = szego_data(&tol);
        let p = compute_p_oap(&data, &tol).unwrap();
        let route = solve_inverse_route(&data, &p, &tol).unwrap();
        let v = interp_functional(&data, &route.f_min).unwrap();
        assert!((v[0] - c(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn orthogonality_of_norms_for_inner_s() {
        // S ≡ 0 is trivially "inner-like" for the norm bookkeeping of H²:
        // here H(K_S) = H² and ‖f_min‖² = x*P⁻¹x = ‖x̃‖².
        let tol = Tolerances::default();
        let data = szego_data(&tol);
        let p = compute_p_oap(&data, &tol).unwrap();
        let route = solve_inverse_route(&data, &p, &tol).unwrap();
        let n2 = h2_norm(&route.f_min).unwrap();
        assert!((n2 * n2 - 0.75).abs() < 1e-10);
        let col = build_colligation(&p, &data.t, &data.e, &data.n, &tol).unwrap();
        let fam = aip_solve(&data, &col, None, &tol).unwrap();
        let xt = vec_norm(&fam.x_tilde);
        assert!((n2 - xt).abs() < 1e-9);
    }

    #[test]
    fn budget_exhausted_means_unique() {
        let tol = Tolerances::default();
        // x*P⁻¹x = 1: target at the edge of the ball.
        let s = certify_schur_default(Realization::zero(1, 1), &tol);
        let data = scalar_data(
            s,
            c(0.5, 0.0),
            c(1.0, 0.0),
            c(0.0, 0.0),
            c((4.0f64 / 3.0).sqrt(), 0.0),
            &tol,
        )
        .unwrap();
        let p = compute_p_oap(&data, &tol).unwrap();
        let col = build_colligation(&p, &data.t, &data.e, &data.n, &tol).unwrap();
        let fam = aip_solve(&data, &col, None, &tol).unwrap();
        assert_eq!(fam.uniqueness, Uniqueness::UniqueByBudget);
        assert!(fam.budget < 1e-6);
    }

    #[test]
    fn over_budget_h_rejected() {
        let tol = Tolerances::default();
        let data = szego_data(&tol);
        let p = compute_p_oap(&data, &tol).unwrap();
        let col = build_colligation(&p, &data.t, &data.e, &data.n, &tol).unwrap();
        // budget is 1/2; a constant h of modulus 0.9 exceeds it
        let h = Realization::constant(scalar(c(0.9, 0.0)));
        let out = aip_solve_with_param(&data, &col, Parameter::Zero, Some(h), &tol);
        assert!(matches!(out, Err(Error::Domain(_))));
    }

    #[test]
    fn homogeneous_solutions_with_zero_target() {
        let tol = Tolerances::default();
        let mut data = szego_data(&tol);
        data.x = Array1::from_elem(1, c(0.0, 0.0));
        let p = compute_p_oap(&data, &tol).unwrap();
        let col = build_colligation(&p, &data.t, &data.e, &data.n, &tol).unwrap();
        let h = Realization::constant(scalar(c(0.8, 0.0)));
        let fam = aip_solve_with_param(&data, &col, Parameter::Zero, Some(h), &tol).unwrap();
        assert!((fam.budget - 1.0).abs() < 1e-12);
        // every member annihilates the interpolation functional: f = G·h
        // vanishes under M_{F^S}^[*]; verify via the exact functional on a
        // realization of f sampled through Taylor refit.
        let coeffs = {
            let mut cs = Vec::new();
            let npts = 256;
            let r = 0.7;
            let samples: Vec<CMat> = (0..npts)
                .map(|k| {
                    let th = 2.0 * std::f64::consts::PI * (k as f64) / (npts as f64);
                    fam.eval(Complex64::from_polar(r, th)).unwrap()
                })
                .collect();
            for j in 0..50 {
                let mut acc = zeros(1, 1);
                for (k, smp) in samples.iter().enumerate() {
                    let th = -2.0 * std::f64::consts::PI * (j as f64) * (k as f64) / (npts as f64);
                    acc = &acc + &smp.mapv(|v| v * Complex64::from_polar(1.0, th));
                }
                cs.push(acc.mapv(|v| v / npts as f64 / r.powi(j)));
            }
            cs
        };
        // Σ T*ⁿ E* f_n with T = 1/2, E = 1, directly from the coefficients.
        let mut v = c(0.0, 0.0);
        let mut tp = c(1.0, 0.0);
        for co in &coeffs {
            v += tp * co[(0, 0)];
            tp *= c(0.5, 0.0);
        }
        assert!(v.norm() < 1e-7, "functional value {v}");
    }

    #[test]
    fn classify_case_tags() {
        let tol = Tolerances::default();
        let data = szego_data(&tol);
        let p = compute_p_oap(&data, &tol).unwrap();
        let col = build_colligation(&p, &data.t, &data.e, &data.n, &tol).unwrap();
        let fam = aip_solve(&data, &col, None, &tol).unwrap();
        assert_eq!(fam.case_tag, CaseTag::General);
        assert_eq!(fam.uniqueness, Uniqueness::NonUnique);
        // coisometric constant parameter collapses the family
        let u = scalar(Complex64::from_polar(1.0, 0.4));
        let fam2 =
            aip_solve_with_param(&data, &col, Parameter::constant(u), None, &tol).unwrap();
        assert_eq!(fam2.uniqueness, Uniqueness::UniqueByDenseRange);
    }

    #[test]
    fn x_outside_range_rejected() {
        let tol = Tolerances::default();
        // P = 0 with E = N = 1, T = 0: X₀ trivial, so only x = 0 admissible.
        let s = certify_schur_default(
            Realization::constant(scalar(c(1.0, 0.0))),
            &tol,
        );
        let data = scalar_data(s, c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.5, 0.0), &tol).unwrap();
        let p = zeros(1, 1);
        let sv = solvability(&p, &data.x, &tol).unwrap();
        assert!(!sv.solvable);
        let col = build_colligation(&p, &data.t, &data.e, &data.n, &tol).unwrap();
        assert!(matches!(
            x_tilde_coords(&col, &data.x, &tol),
            Err(Error::Unsolvable { .. })
        ));
    }
}
