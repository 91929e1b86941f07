//! Rational matrix-valued functions via state-space realizations.
//!
//! A [`Realization`] `(A,B,C,D)` represents `R(z) = D + zC(I−zA)⁻¹B` on the
//! unit disk.  Everything rational in the library — Schur functions, the
//! colligation characteristic function, solutions, Blaschke products — is
//! carried in this form, so evaluation, Taylor coefficients, products, sums,
//! Möbius composition and exact `H²` inner products are all available without
//! truncation.

use num_complex::Complex64;

use crate::numlin::{
    self, adjoint, block, eye, fro_norm, lin_solve, op_norm, solve_displacement,
    spectral_radius, zeros, Tolerances,
};
use crate::{CMat, Error, Result};

/// State-space realization of `R(z) = D + zC(I−zA)⁻¹B`.
///
/// `A` is n×n (state), `B` is n×p (input), `C` is q×n (output), `D` is q×p.
#[derive(Debug, Clone)]
pub struct Realization {
    pub a: CMat,
    pub b: CMat,
    pub c: CMat,
    pub d: CMat,
    /// Spectral radius of `A`, cached at construction.
    rho: f64,
}

impl Realization {
    pub fn new(a: CMat, b: CMat, c: CMat, d: CMat) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::Dimension("realization: A must be square".into()));
        }
        let (q, p) = (d.nrows(), d.ncols());
        if b.nrows() != n || b.ncols() != p || c.nrows() != q || c.ncols() != n {
            return Err(Error::Dimension(format!(
                "realization: incompatible dims A {}x{}, B {}x{}, C {}x{}, D {}x{}",
                a.nrows(),
                a.ncols(),
                b.nrows(),
                b.ncols(),
                c.nrows(),
                c.ncols(),
                d.nrows(),
                d.ncols()
            )));
        }
        let rho = spectral_radius(&a);
        Ok(Realization { a, b, c, d, rho })
    }

    /// State dimension n.
    pub fn state_dim(&self) -> usize {
        self.a.nrows()
    }
    /// Input dimension p.
    pub fn input_dim(&self) -> usize {
        self.d.ncols()
    }
    /// Output dimension q.
    pub fn output_dim(&self) -> usize {
        self.d.nrows()
    }
    /// Cached spectral radius of the state matrix.
    pub fn spectral_radius(&self) -> f64 {
        self.rho
    }
    /// True when the state matrix is stable (ρ(A) < 1), so the function is
    /// analytic on a neighborhood of the closed disk and lies in `H²`.
    pub fn is_stable(&self) -> bool {
        self.rho < 1.0
    }

    /// Constant function `R ≡ D` (empty state).
    pub fn constant(d: CMat) -> Self {
        let (q, p) = (d.nrows(), d.ncols());
        Realization {
            a: zeros(0, 0),
            b: zeros(0, p),
            c: zeros(q, 0),
            d,
            rho: 0.0,
        }
    }

    /// The scalar shift `R(z) = z`.
    pub fn shift() -> Self {
        Realization {
            a: zeros(1, 1),
            b: eye(1),
            c: eye(1),
            d: zeros(1, 1),
            rho: 0.0,
        }
    }

    /// Zero function with the given output/input dimensions.
    pub fn zero(q: usize, p: usize) -> Self {
        Realization::constant(zeros(q, p))
    }

    /// Observability-type function `z ↦ E(I−zT)⁻¹X` as a realization.
    ///
    /// The defining identity `E(I−zT)⁻¹X = EX + zE(I−zT)⁻¹TX` gives
    /// `(A,B,C,D) = (T, TX, E, EX)`.
    pub fn observer(e: &CMat, t: &CMat, x: &CMat) -> Result<Self> {
        Realization::new(t.clone(), t.dot(x), e.clone(), e.dot(x))
    }

    /// Evaluate at `z`.
    pub fn eval(&self, z: Complex64) -> Result<CMat> {
        let n = self.state_dim();
        if n == 0 {
            return Ok(self.d.clone());
        }
        let m = &eye(n) - &self.a.mapv(|v| v * z);
        let x = lin_solve(&m, &self.b).map_err(|_| Error::Pole { z })?;
        Ok(&self.d + &self.c.dot(&x).mapv(|v| v * z))
    }

    /// First `m` Taylor coefficients `[D, CB, CAB, …, CA^{m−2}B]`.
    pub fn taylor_coeffs(&self, m: usize) -> Vec<CMat> {
        let mut out = Vec::with_capacity(m);
        if m == 0 {
            return out;
        }
        out.push(self.d.clone());
        let mut akb = self.b.clone();
        for _ in 1..m {
            out.push(self.c.dot(&akb));
            akb = self.a.dot(&akb);
        }
        out
    }

    /// Pointwise sum (same dimensions): direct sum of states.
    pub fn add(&self, other: &Realization) -> Result<Self> {
        if self.input_dim() != other.input_dim() || self.output_dim() != other.output_dim() {
            return Err(Error::Dimension("realization add: dimension mismatch".into()));
        }
        let (n1, n2) = (self.state_dim(), other.state_dim());
        let a = block(&[
            &[&self.a, &zeros(n1, n2)],
            &[&zeros(n2, n1), &other.a],
        ]);
        let b = block(&[&[&self.b], &[&other.b]]);
        let c = block(&[&[&self.c, &other.c]]);
        let d = &self.d + &other.d;
        Realization::new(a, b, c, d)
    }

    /// Pointwise difference.
    pub fn sub(&self, other: &Realization) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Multiply by a complex scalar.
    pub fn scale(&self, k: Complex64) -> Self {
        Realization {
            a: self.a.clone(),
            b: self.b.clone(),
            c: self.c.mapv(|v| v * k),
            d: self.d.mapv(|v| v * k),
            rho: self.rho,
        }
    }

    /// Pointwise product `self(z) · other(z)` (cascade connection).
    pub fn mul(&self, other: &Realization) -> Result<Self> {
        if self.input_dim() != other.output_dim() {
            return Err(Error::Dimension(format!(
                "realization mul: {} inputs vs {} outputs",
                self.input_dim(),
                other.output_dim()
            )));
        }
        let (n1, n2) = (self.state_dim(), other.state_dim());
        let a = block(&[
            &[&self.a, &self.b.dot(&other.c)],
            &[&zeros(n2, n1), &other.a],
        ]);
        let b = block(&[&[&self.b.dot(&other.d)], &[&other.b]]);
        let c = block(&[&[&self.c, &self.d.dot(&other.c)]]);
        let d = self.d.dot(&other.d);
        Realization::new(a, b, c, d)
    }

    /// Multiply by a constant matrix on the left: `M · self(z)`.
    pub fn lmul_const(&self, m: &CMat) -> Result<Self> {
        Realization::new(
            self.a.clone(),
            self.b.clone(),
            m.dot(&self.c),
            m.dot(&self.d),
        )
    }

    /// Multiply by a constant matrix on the right: `self(z) · M`.
    pub fn rmul_const(&self, m: &CMat) -> Result<Self> {
        Realization::new(
            self.a.clone(),
            self.b.dot(m),
            self.c.clone(),
            self.d.dot(m),
        )
    }

    /// Compose with the disk automorphism `φ_ω(z) = (z−ω)/(1−zω̄)`:
    /// returns a realization of `z ↦ R(φ_ω(z))`.
    ///
    /// With `M = (ω̄I+A)(I+ωA)⁻¹` and `K = (I+ωA)⁻¹B` the composition is
    /// `(D−ωCK) + zC(I−ωM)(I−zM)⁻¹K`.
    pub fn compose_mobius(&self, omega: Complex64) -> Result<Self> {
        if omega.norm() >= 1.0 {
            return Err(Error::Domain("mobius: |ω| must be < 1".into()));
        }
        let n = self.state_dim();
        if n == 0 {
            return Ok(self.clone());
        }
        let i = eye(n);
        let i_plus = &i + &self.a.mapv(|v| v * omega);
        let m = lin_solve(&i_plus, &(&self.a + &i.mapv(|v| v * omega.conj())))
            .map_err(|_| Error::Singular("mobius: I+ωA singular".into()))?;
        // (ω̄I+A) and (I+ωA)⁻¹ commute, so left/right placement is immaterial.
        let k = lin_solve(&i_plus, &self.b)?;
        let c_new = self.c.dot(&(&i - &m.mapv(|v| v * omega)));
        let d_new = &self.d - &self.c.dot(&k).mapv(|v| v * omega);
        Realization::new(m, k, c_new, d_new)
    }
}

/// Exact `H²` inner product `⟨f,g⟩ = Σ_n tr(g_n* f_n)` of two stable
/// realizations with matching dimensions, via the cross-Gramian
/// `X − A_g* X A_f = C_g* C_f`.
pub fn h2_inner_product(f: &Realization, g: &Realization) -> Result<Complex64> {
    if f.input_dim() != g.input_dim() || f.output_dim() != g.output_dim() {
        return Err(Error::Dimension("h2_inner_product: dimension mismatch".into()));
    }
    if !f.is_stable() || !g.is_stable() {
        return Err(Error::Domain(
            "h2_inner_product: both realizations must have ρ(A) < 1".into(),
        ));
    }
    let x = solve_displacement(&adjoint(&g.a), &f.a, &adjoint(&g.c).dot(&f.c))?;
    let t0 = adjoint(&g.d).dot(&f.d);
    let t1 = adjoint(&g.b).dot(&x).dot(&f.b);
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..t0.nrows().min(t0.ncols()) {
        acc += t0[(i, i)];
    }
    for i in 0..t1.nrows().min(t1.ncols()) {
        acc += t1[(i, i)];
    }
    Ok(acc)
}

/// `H²` norm of a stable realization.
pub fn h2_norm(f: &Realization) -> Result<f64> {
    Ok(h2_inner_product(f, f)?.re.max(0.0).sqrt())
}

// ---------------------------------------------------------------------------
// Schur functions
// ---------------------------------------------------------------------------

/// Record of a grid certification.
#[derive(Debug, Clone)]
pub struct GridCert {
    /// Human-readable description of the grid used.
    pub grid: String,
    /// Worst value observed (max singular value for contractivity, max
    /// isometry defect for innerness).
    pub worst: f64,
}

/// A rational function together with grid certificates of Schur-class
/// membership and innerness.
///
/// The certificates are statements about the grid only, not proofs on the
/// whole disk; the grid used is recorded alongside the verdict.
#[derive(Debug, Clone)]
pub struct SchurFunction {
    pub realization: Realization,
    pub certified_contractive: Option<GridCert>,
    pub certified_inner: Option<GridCert>,
}

impl SchurFunction {
    /// Wrap a realization without certificates.
    pub fn uncertified(realization: Realization) -> Self {
        SchurFunction {
            realization,
            certified_contractive: None,
            certified_inner: None,
        }
    }

    pub fn eval(&self, z: Complex64) -> Result<CMat> {
        self.realization.eval(z)
    }
    pub fn input_dim(&self) -> usize {
        self.realization.input_dim()
    }
    pub fn output_dim(&self) -> usize {
        self.realization.output_dim()
    }
    pub fn is_inner(&self) -> bool {
        self.certified_inner.is_some()
    }
}

/// Default disk certification grid: 21 radii `0.995·k/20` × 21 angles.
pub fn default_disk_grid() -> Vec<Complex64> {
    let mut pts = Vec::with_capacity(21 * 21);
    for k in 0..21 {
        let r = 0.995 * (k as f64) / 20.0;
        for j in 0..21 {
            let th = 2.0 * std::f64::consts::PI * (j as f64) / 21.0;
            pts.push(Complex64::from_polar(r, th));
        }
    }
    pts
}

/// Default boundary certification grid: 64 equispaced points on the circle.
pub fn default_circle_grid() -> Vec<Complex64> {
    (0..64)
        .map(|j| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (j as f64) / 64.0))
        .collect()
}

/// Certify a realization as Schur-class / inner by grid evaluation.
///
/// The contractive flag is set when `‖S(z)‖ ≤ 1 + psd_tol` at every disk grid
/// point; the inner flag additionally requires `‖S(t)*S(t) − I‖ ≤ residual
/// threshold` at every boundary grid point (square case only).  Flags are
/// simply left unset on failure.
pub fn certify_schur(
    realization: Realization,
    disk_grid: &[Complex64],
    circle_grid: &[Complex64],
    tol: &Tolerances,
) -> SchurFunction {
    let mut worst_norm: f64 = 0.0;
    let mut contractive = true;
    for &z in disk_grid {
        match realization.eval(z) {
            Ok(v) => {
                let nv = op_norm(&v);
                worst_norm = worst_norm.max(nv);
                if nv > 1.0 + tol.psd_tol {
                    contractive = false;
                }
            }
            Err(_) => contractive = false,
        }
    }
    let certified_contractive = contractive.then(|| GridCert {
        grid: format!("disk grid ({} points, radii ≤ 0.995)", disk_grid.len()),
        worst: worst_norm,
    });

    let mut inner = contractive && realization.input_dim() == realization.output_dim();
    let mut worst_defect: f64 = 0.0;
    if inner {
        let iq = eye(realization.output_dim());
        for &t in circle_grid {
            match realization.eval(t) {
                Ok(v) => {
                    let defect = fro_norm(&(&adjoint(&v).dot(&v) - &iq));
                    worst_defect = worst_defect.max(defect);
                    // Boundary evaluation of a rational function with poles
                    // near the circle is less accurate than interior work.
                    if defect > tol.residual_tol.max(1e-8) {
                        inner = false;
                    }
                }
                Err(_) => inner = false,
            }
        }
    }
    let certified_inner = inner.then(|| GridCert {
        grid: format!("boundary grid ({} points)", circle_grid.len()),
        worst: worst_defect,
    });

    SchurFunction {
        realization,
        certified_contractive,
        certified_inner,
    }
}

/// Certify with the default grids.
pub fn certify_schur_default(realization: Realization, tol: &Tolerances) -> SchurFunction {
    certify_schur(
        realization,
        &default_disk_grid(),
        &default_circle_grid(),
        tol,
    )
}

/// de Branges–Rovnyak kernel `K_S(z,ζ) = (I − S(z)S(ζ)*)/(1 − zζ̄)`.
pub fn kernel_ks(s_fun: &SchurFunction, z: Complex64, zeta: Complex64) -> Result<CMat> {
    let denom = Complex64::new(1.0, 0.0) - z * zeta.conj();
    if denom.norm() < 1e-14 {
        return Err(Error::Domain(format!(
            "kernel denominator 1−zζ̄ vanishes at z={z}, ζ={zeta}"
        )));
    }
    let sz = s_fun.eval(z)?;
    let szeta = s_fun.eval(zeta)?;
    let num = &eye(s_fun.output_dim()) - &sz.dot(&adjoint(&szeta));
    Ok(num.mapv(|v| v / denom))
}

/// Finite Blaschke product with the given zeros and a unimodular phase.
///
/// Built as a cascade of elementary degree-1 unitary colligations
/// `[[w̄, √(1−|w|²)], [√(1−|w|²), −w]]`, one per zero, so the product is
/// inner by construction; the phase multiplies the output.  The result is
/// additionally grid-certified.
pub fn blaschke(zeros_list: &[Complex64], phase: Complex64, tol: &Tolerances) -> Result<SchurFunction> {
    if (phase.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::Domain(format!(
            "blaschke phase must be unimodular, got |phase| = {}",
            phase.norm()
        )));
    }
    let mut acc = Realization::constant(numlin::scalar(phase));
    for &w in zeros_list {
        if w.norm() >= 1.0 {
            return Err(Error::Domain(format!(
                "blaschke zero {w} is not strictly inside the disk"
            )));
        }
        let defect = (1.0 - w.norm_sqr()).sqrt();
        let factor = Realization::new(
            numlin::scalar(w.conj()),
            numlin::scalar(Complex64::new(defect, 0.0)),
            numlin::scalar(Complex64::new(defect, 0.0)),
            numlin::scalar(-w),
        )?;
        acc = acc.mul(&factor)?;
    }
    let sf = certify_schur_default(acc, tol);
    if sf.certified_inner.is_none() {
        return Err(Error::Internal(
            "blaschke product failed its own inner certification".into(),
        ));
    }
    Ok(sf)
}

/// Taylor coefficients of a function around an interior point by contour
/// integration: coefficients of `f(w + ζ)`… not needed; coefficients of `f`
/// at the origin recovered from samples on the circle of radius `r` via an
/// inverse discrete Fourier transform of length `npts`.
///
/// For `|coefficient tail| ≤ C·ρ^n` the aliasing error of coefficient `j` is
/// bounded by `C·ρ^{npts+j} / r^{npts}`-type terms; callers pick `r` and
/// `npts` accordingly.  Used as an independent oracle in tests and for
/// membership checks on sampled functions.
pub fn taylor_via_contour<F>(f: F, r: f64, npts: usize, m: usize) -> Result<Vec<Complex64>>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let mut samples = Vec::with_capacity(npts);
    for k in 0..npts {
        let th = 2.0 * std::f64::consts::PI * (k as f64) / (npts as f64);
        samples.push(f(Complex64::from_polar(r, th))?);
    }
    let mut coeffs = Vec::with_capacity(m);
    for j in 0..m {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, &v) in samples.iter().enumerate() {
            let th = -2.0 * std::f64::consts::PI * (j as f64) * (k as f64) / (npts as f64);
            acc += v * Complex64::from_polar(1.0, th);
        }
        coeffs.push(acc / (npts as f64) / r.powi(j as i32));
    }
    Ok(coeffs)
}

#[allow(unused_imports)]
pub(crate) use crate::numlin::scalar;

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eval_constant_and_shift() {
        let d = array![[c(2.0, 1.0)]];
        let r = Realization::constant(d.clone());
        assert_eq!(r.eval(c(0.3, 0.2)).unwrap(), d);
        let sh = Realization::shift();
        let z = c(0.25, -0.4);
        assert!((sh.eval(z).unwrap()[(0, 0)] - z).norm() < 1e-15);
    }

    #[test]
    fn eval_at_zero_gives_d() {
        let tol = Tolerances::default();
        let b = blaschke(&[c(0.5, 0.0)], c(1.0, 0.0), &tol).unwrap();
        let v0 = b.eval(c(0.0, 0.0)).unwrap()[(0, 0)];
        assert!((v0 - c(-0.5, 0.0)).norm() < 1e-14);
        // zero of the Blaschke factor
        let vz = b.eval(c(0.5, 0.0)).unwrap()[(0, 0)];
        assert!(vz.norm() < 1e-14);
    }

    #[test]
    fn taylor_coeffs_examples() {
        let sh = Realization::shift();
        let cs = sh.taylor_coeffs(4);
        assert!(cs[0][(0, 0)].norm() < 1e-15);
        assert!((cs[1][(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
        assert!(cs[2][(0, 0)].norm() < 1e-15);

        let tol = Tolerances::default();
        let b = blaschke(&[c(0.5, 0.0)], c(1.0, 0.0), &tol).unwrap();
        let cs = b.realization.taylor_coeffs(3);
        // (z−1/2)/(1−z/2) = −1/2 + (3/4)z + (3/8)z² + …
        assert!((cs[0][(0, 0)] - c(-0.5, 0.0)).norm() < 1e-14);
        assert!((cs[1][(0, 0)] - c(0.75, 0.0)).norm() < 1e-14);
        assert!((cs[2][(0, 0)] - c(0.375, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn taylor_partial_sums_converge() {
        let tol = Tolerances::default();
        let b = blaschke(&[c(0.3, 0.4), c(-0.2, 0.1)], c(1.0, 0.0), &tol).unwrap();
        let z = c(0.6, 0.3); // |z| ≈ 0.67
        let cs = b.realization.taylor_coeffs(200);
        let mut acc = c(0.0, 0.0);
        let mut zp = c(1.0, 0.0);
        for coeff in &cs {
            acc += coeff[(0, 0)] * zp;
            zp *= z;
        }
        let direct = b.eval(z).unwrap()[(0, 0)];
        assert!((acc - direct).norm() < 1e-10);
    }

    #[test]
    fn kernel_examples() {
        let tol = Tolerances::default();
        // S ≡ 0: Szegő kernel
        let s0 = certify_schur_default(Realization::zero(1, 1), &tol);
        let k = kernel_ks(&s0, c(0.5, 0.0), c(0.5, 0.0)).unwrap();
        assert!((k[(0, 0)] - c(4.0 / 3.0, 0.0)).norm() < 1e-14);
        // S(z)=z at z=ζ=1/2 → 1
        let sz = certify_schur_default(Realization::shift(), &tol);
        let k = kernel_ks(&sz, c(0.5, 0.0), c(0.5, 0.0)).unwrap();
        assert!((k[(0, 0)] - c(1.0, 0.0)).norm() < 1e-14);
        // unimodular constant → 0
        let su = certify_schur_default(
            Realization::constant(numlin::scalar(Complex64::from_polar(1.0, 0.7))),
            &tol,
        );
        let k = kernel_ks(&su, c(0.2, 0.1), c(-0.3, 0.2)).unwrap();
        assert!(k[(0, 0)].norm() < 1e-14);
    }

    #[test]
    fn kernel_psd_on_random_points() {
        let tol = Tolerances::default();
        let b = blaschke(&[c(0.5, 0.0), c(0.0, 0.3)], c(1.0, 0.0), &tol).unwrap();
        for i in 0..50 {
            let th = 0.13 * i as f64;
            let z = Complex64::from_polar(0.9 * ((i as f64 * 0.017).sin().abs()), th);
            let k = kernel_ks(&b, z, z).unwrap();
            assert!(k[(0, 0)].re >= -1e-12);
        }
    }

    #[test]
    fn certify_flags() {
        let tol = Tolerances::default();
        let s0 = certify_schur_default(Realization::zero(1, 1), &tol);
        assert!(s0.certified_contractive.is_some());
        assert!(s0.certified_inner.is_none());

        let b = blaschke(&[c(0.5, 0.0)], c(1.0, 0.0), &tol).unwrap();
        assert!(b.certified_contractive.is_some() && b.certified_inner.is_some());

        let big = certify_schur_default(
            Realization::constant(numlin::scalar(c(2.0, 0.0))),
            &tol,
        );
        assert!(big.certified_contractive.is_none());
    }

    #[test]
    fn blaschke_unimodular_on_boundary() {
        let tol = Tolerances::default();
        let b = blaschke(&[c(0.5, 0.0), c(-0.1, 0.6), c(0.2, 0.2)], c(0.6, 0.8), &tol).unwrap();
        for t in default_circle_grid() {
            let v = b.eval(t).unwrap()[(0, 0)];
            assert!((v.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn h2_inner_product_examples() {
        let one = Realization::constant(numlin::scalar(c(1.0, 0.0)));
        assert!((h2_inner_product(&one, &one).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        let sh = Realization::shift();
        assert!(h2_inner_product(&sh, &one).unwrap().norm() < 1e-15);
        // f = (3/4)/(1−z/2): ⟨f,f⟩ = (9/16)·Σ 4⁻ⁿ = 3/4
        let f = Realization::new(
            numlin::scalar(c(0.5, 0.0)),
            numlin::scalar(c(0.5, 0.0)),
            numlin::scalar(c(0.75, 0.0)),
            numlin::scalar(c(0.75, 0.0)),
        )
        .unwrap();
        assert!((h2_inner_product(&f, &f).unwrap() - c(0.75, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn inner_multiplication_preserves_h2_norm() {
        let tol = Tolerances::default();
        let b = blaschke(&[c(0.5, 0.0), c(0.0, -0.4)], c(1.0, 0.0), &tol).unwrap();
        for k in 0..10 {
            let w = Complex64::from_polar(0.08 * k as f64, 1.3 * k as f64);
            // f = 1/(1−wz), ‖f‖² = 1/(1−|w|²)
            let f = Realization::new(
                numlin::scalar(w),
                numlin::scalar(w),
                numlin::scalar(c(1.0, 0.0)),
                numlin::scalar(c(1.0, 0.0)),
            )
            .unwrap();
            let bf = b.realization.mul(&f).unwrap();
            let n1 = h2_norm(&f).unwrap();
            let n2 = h2_norm(&bf).unwrap();
            assert!((n1 - n2).abs() < 1e-10, "k={k}: {n1} vs {n2}");
        }
    }

    #[test]
    fn mobius_composition_matches_pointwise() {
        let tol = Tolerances::default();
        let b = blaschke(&[c(0.5, 0.0), c(0.1, -0.3)], c(1.0, 0.0), &tol).unwrap();
        let omega = c(0.3, 0.2);
        let comp = b.realization.compose_mobius(omega).unwrap();
        for k in 0..20 {
            let z = Complex64::from_polar(0.85 * ((k as f64) / 20.0), 0.9 * k as f64);
            let phi = (z - omega) / (c(1.0, 0.0) - z * omega.conj());
            let lhs = comp.eval(z).unwrap()[(0, 0)];
            let rhs = b.eval(phi).unwrap()[(0, 0)];
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn product_and_sum_realizations() {
        let tol = Tolerances::default();
        let b1 = blaschke(&[c(0.5, 0.0)], c(1.0, 0.0), &tol).unwrap().realization;
        let b2 = blaschke(&[c(-0.2, 0.3)], c(1.0, 0.0), &tol).unwrap().realization;
        let prod = b1.mul(&b2).unwrap();
        let sum = b1.add(&b2).unwrap();
        let z = c(0.4, -0.1);
        let (v1, v2) = (b1.eval(z).unwrap()[(0, 0)], b2.eval(z).unwrap()[(0, 0)]);
        assert!((prod.eval(z).unwrap()[(0, 0)] - v1 * v2).norm() < 1e-13);
        assert!((sum.eval(z).unwrap()[(0, 0)] - (v1 + v2)).norm() < 1e-13);
    }

    #[test]
    fn observer_realization() {
        let t = array![[c(0.5, 0.0)]];
        let e = array![[c(1.0, 0.0)]];
        let x = array![[c(1.0, 0.0)]];
        let r = Realization::observer(&e, &t, &x).unwrap();
        // E(I−zT)⁻¹x = 1/(1−z/2)
        let z = c(0.5, 0.0);
        assert!((r.eval(z).unwrap()[(0, 0)] - c(4.0 / 3.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn contour_taylor_oracle() {
        let tol = Tolerances::default();
        let b = blaschke(&[c(0.5, 0.0)], c(1.0, 0.0), &tol).unwrap();
        let cs = taylor_via_contour(
            |z| Ok(b.eval(z)?[(0, 0)]),
            0.8,
            256,
            5,
        )
        .unwrap();
        let direct = b.realization.taylor_coeffs(5);
        for j in 0..5 {
            assert!((cs[j] - direct[j][(0, 0)]).norm() < 1e-10);
        }
    }

    #[test]
    fn eval_reports_pole() {
        // R(z) = 1/(1−2z) has a pole at 1/2
        let r = Realization::new(
            numlin::scalar(c(2.0, 0.0)),
            numlin::scalar(c(2.0, 0.0)),
            numlin::scalar(c(1.0, 0.0)),
            numlin::scalar(c(1.0, 0.0)),
        )
        .unwrap();
        assert!(matches!(r.eval(c(0.5, 0.0)), Err(Error::Pole { .. })));
    }
}
