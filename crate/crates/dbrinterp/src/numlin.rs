//! Dense complex linear algebra kernel.
//!
//! Deterministic building blocks shared by every other module: Hermitian/PSD
//! calculus, matrix square roots, Moore–Penrose pseudoinverses, numerical
//! range and kernel bases, Stein/Sylvester solves by dense vectorization,
//! Schur complements, and unitary completion of isometric column blocks.
//!
//! The factorization backend is `faer`; everything here converts to and from
//! the crate-wide `ndarray` carrier at the boundary.

use faer::complex_native::c64;
use faer::prelude::*;
use faer::Mat;
use ndarray::{s, Array1, Array2};
use num_complex::Complex64;

use crate::{CMat, CVec, Error, Result};

/// Numerical tolerances used throughout the library.
///
/// * `rank_tol` — relative singular-value cutoff: σ < rank_tol·σ_max counts
///   as zero.
/// * `psd_tol` — eigenvalue floor: eigenvalues in `[−psd_tol, 0]` are clamped
///   to zero in PSD verdicts and square roots.
/// * `residual_tol` — acceptance threshold for equation residuals
///   (Stein identities, Penrose identities, unitarity).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rank_tol: f64,
    pub psd_tol: f64,
    pub residual_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rank_tol: 1e-10,
            psd_tol: 1e-9,
            residual_tol: 1e-9,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        if self.rank_tol > 0.0 && self.psd_tol > 0.0 && self.residual_tol > 0.0 {
            Ok(())
        } else {
            Err(Error::Input(
                "all tolerances must be strictly positive".into(),
            ))
        }
    }
}

// ---------------------------------------------------------------------------
// Conversions and elementary matrix helpers
// ---------------------------------------------------------------------------

pub(crate) fn to_faer(m: &CMat) -> Mat<c64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| {
        let v = m[(i, j)];
        c64::new(v.re, v.im)
    })
}

pub(crate) fn from_faer(m: &Mat<c64>) -> CMat {
    Array2::from_shape_fn((m.nrows(), m.ncols()), |(i, j)| {
        let v = m.read(i, j);
        Complex64::new(v.re, v.im)
    })
}

/// Conjugate transpose.
pub fn adjoint(m: &CMat) -> CMat {
    Array2::from_shape_fn((m.ncols(), m.nrows()), |(i, j)| m[(j, i)].conj())
}

/// Complex identity matrix.
pub fn eye(n: usize) -> CMat {
    Array2::from_shape_fn((n, n), |(i, j)| {
        if i == j {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Zero matrix.
pub fn zeros(r: usize, c: usize) -> CMat {
    Array2::from_elem((r, c), Complex64::new(0.0, 0.0))
}

/// Frobenius norm.
pub fn fro_norm(m: &CMat) -> f64 {
    m.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Euclidean norm of a vector.
pub fn vec_norm(v: &CVec) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Operator (spectral) norm: largest singular value; 0 for empty matrices.
pub fn op_norm(m: &CMat) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Singular values in descending order.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let svd = to_faer(m).svd();
    let s = svd.s_diagonal();
    (0..s.nrows()).map(|i| s.read(i).re).collect()
}

/// Full SVD `M = U diag(σ) V*`: returns `(U, σ, V)` with `U` rows×rows and
/// `V` cols×cols.
pub fn svd_full(m: &CMat) -> (CMat, Vec<f64>, CMat) {
    let (r, c) = (m.nrows(), m.ncols());
    if r == 0 || c == 0 {
        return (eye(r), Vec::new(), eye(c));
    }
    let svd = to_faer(m).svd();
    let u = from_faer(&svd.u().to_owned());
    let v = from_faer(&svd.v().to_owned());
    let sd = svd.s_diagonal();
    let s = (0..sd.nrows()).map(|i| sd.read(i).re).collect();
    (u, s, v)
}

/// Numerical rank with the relative cutoff σ < rank_tol·σ_max.
pub fn numerical_rank(m: &CMat, tol: &Tolerances) -> usize {
    let sv = singular_values(m);
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&x| x >= tol.rank_tol * smax).count()
}

/// Solve the square system `A X = B` by LU with partial pivoting.
pub fn lin_solve(a: &CMat, b: &CMat) -> Result<CMat> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::Dimension(format!(
            "lin_solve needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if b.nrows() != n {
        return Err(Error::Dimension(format!(
            "lin_solve rhs has {} rows, expected {}",
            b.nrows(),
            n
        )));
    }
    if n == 0 {
        return Ok(zeros(0, b.ncols()));
    }
    let fa = to_faer(a);
    let fb = to_faer(b);
    let lu = fa.partial_piv_lu();
    let x = lu.solve(&fb);
    let x = from_faer(&x);
    // Partial-pivot LU does not signal singularity; check the residual.
    let resid = fro_norm(&(a.dot(&x) - b));
    let scale = 1.0 + fro_norm(b);
    if !resid.is_finite() || resid > 1e-6 * scale {
        return Err(Error::Singular(format!(
            "residual {resid:.3e} after LU solve"
        )));
    }
    Ok(x)
}

/// Inverse of a square matrix.
pub fn inv(a: &CMat) -> Result<CMat> {
    lin_solve(a, &eye(a.nrows()))
}

/// Eigenvalues of a general square matrix, in no particular order.
pub fn eigenvalues(a: &CMat) -> Vec<Complex64> {
    if a.nrows() == 0 {
        return Vec::new();
    }
    to_faer(a)
        .eigenvalues::<c64>()
        .iter()
        .map(|l| Complex64::new(l.re, l.im))
        .collect()
}

/// Spectral radius (largest |eigenvalue|); 0 for the empty matrix.
pub fn spectral_radius(a: &CMat) -> f64 {
    let n = a.nrows();
    if n == 0 {
        return 0.0;
    }
    let fa = to_faer(a);
    fa.eigenvalues::<c64>()
        .iter()
        .map(|l| (l.re * l.re + l.im * l.im).sqrt())
        .fold(0.0, f64::max)
}

/// Eigendecomposition of a Hermitian matrix: ascending real eigenvalues and
/// the unitary of eigenvectors (columns).
fn hermitian_eig(h: &CMat) -> (Vec<f64>, CMat) {
    let n = h.nrows();
    if n == 0 {
        return (Vec::new(), zeros(0, 0));
    }
    let fh = to_faer(h);
    let ed = fh.selfadjoint_eigendecomposition(faer::Side::Lower);
    let u = from_faer(&ed.u().to_owned());
    let sm = ed.s().column_vector().to_owned();
    let vals: Vec<f64> = (0..n).map(|i| sm.read(i).re).collect();
    (vals, u)
}

// ---------------------------------------------------------------------------
// PSD calculus
// ---------------------------------------------------------------------------

/// Verdict of a Hermitian/PSD test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdVerdict {
    pub is_hermitian: bool,
    pub is_psd: bool,
    pub min_eigenvalue: f64,
}

/// Test whether `H` is Hermitian and positive semidefinite.
///
/// Hermitian means `‖H−H*‖_F ≤ residual_tol·(1+‖H‖_F)`; PSD means Hermitian
/// with smallest eigenvalue ≥ −psd_tol (eigenvalues are taken of the
/// Hermitian part so that the verdict is well defined even for slightly
/// asymmetric input).
pub fn psd_check(h: &CMat, tol: &Tolerances) -> Result<PsdVerdict> {
    let n = h.nrows();
    if h.ncols() != n {
        return Err(Error::Dimension(format!(
            "psd_check needs a square matrix, got {}x{}",
            h.nrows(),
            h.ncols()
        )));
    }
    if n == 0 {
        return Ok(PsdVerdict {
            is_hermitian: true,
            is_psd: true,
            min_eigenvalue: 0.0,
        });
    }
    let ha = adjoint(h);
    let herm_resid = fro_norm(&(h - &ha));
    let is_hermitian = herm_resid <= tol.residual_tol * (1.0 + fro_norm(h));
    let sym = (h + &ha).mapv(|v| v * 0.5);
    let (vals, _) = hermitian_eig(&sym);
    let min_eigenvalue = vals.first().copied().unwrap_or(0.0);
    Ok(PsdVerdict {
        is_hermitian,
        is_psd: is_hermitian && min_eigenvalue >= -tol.psd_tol,
        min_eigenvalue,
    })
}

/// Hermitian PSD square root via eigendecomposition.
///
/// Eigenvalues in `[−psd_tol, 0]` are clamped to zero; anything more negative
/// is rejected.
pub fn sqrt_psd(h: &CMat, tol: &Tolerances) -> Result<CMat> {
    let verdict = psd_check(h, tol)?;
    if !verdict.is_psd {
        return Err(Error::NotPsd {
            min_eig: verdict.min_eigenvalue,
        });
    }
    let n = h.nrows();
    if n == 0 {
        return Ok(zeros(0, 0));
    }
    let ha = adjoint(h);
    let sym = (h + &ha).mapv(|v| v * 0.5);
    let (vals, u) = hermitian_eig(&sym);
    let sqrt_d: CVec = Array1::from_iter(
        vals.iter()
            .map(|&l| Complex64::new(l.max(0.0).sqrt(), 0.0)),
    );
    // U diag(sqrt) U*
    let mut scaled = u.clone();
    for (j, col) in scaled.columns_mut().into_iter().enumerate() {
        let f = sqrt_d[j];
        for v in col {
            *v *= f;
        }
    }
    Ok(scaled.dot(&adjoint(&u)))
}

/// Moore–Penrose pseudoinverse with relative rank cutoff.
pub fn pinv(m: &CMat, tol: &Tolerances) -> CMat {
    let (r, c) = (m.nrows(), m.ncols());
    if r == 0 || c == 0 {
        return zeros(c, r);
    }
    let svd = to_faer(m).svd();
    let u = from_faer(&svd.u().to_owned());
    let v = from_faer(&svd.v().to_owned());
    let sd = svd.s_diagonal();
    let k = sd.nrows();
    let smax = if k > 0 { sd.read(0).re } else { 0.0 };
    // pinv = V diag(1/σ) U* over the retained singular values.
    let mut out = zeros(c, r);
    for l in 0..k {
        let sigma = sd.read(l).re;
        if smax == 0.0 || sigma < tol.rank_tol * smax {
            continue;
        }
        let inv_s = Complex64::new(1.0 / sigma, 0.0);
        let vcol = v.slice(s![.., l]);
        let ucol = u.slice(s![.., l]);
        for i in 0..c {
            for j in 0..r {
                out[(i, j)] += vcol[i] * inv_s * ucol[j].conj();
            }
        }
    }
    out
}

/// Orthonormal bases of the numerical range and kernel of `M`.
///
/// Returns `(range_onb, kernel_onb)`: columns of `range_onb` span the range
/// of `M` (a subspace of C^rows), columns of `kernel_onb` span the kernel
/// (a subspace of C^cols); rank + nullity = cols.
pub fn range_basis(m: &CMat, tol: &Tolerances) -> (CMat, CMat) {
    let (r, c) = (m.nrows(), m.ncols());
    if r == 0 || c == 0 {
        return (zeros(r, 0), eye(c));
    }
    let svd = to_faer(m).svd();
    let u = from_faer(&svd.u().to_owned());
    let v = from_faer(&svd.v().to_owned());
    let sd = svd.s_diagonal();
    let k = sd.nrows();
    let smax = if k > 0 { sd.read(0).re } else { 0.0 };
    let rank = if smax == 0.0 {
        0
    } else {
        (0..k)
            .filter(|&l| sd.read(l).re >= tol.rank_tol * smax)
            .count()
    };
    let range = u.slice(s![.., ..rank]).to_owned();
    let kernel = v.slice(s![.., rank..]).to_owned();
    (range, kernel)
}

/// Orthonormal basis of the orthogonal complement of the range of `M`
/// inside C^rows.
pub fn corange_complement(m: &CMat, tol: &Tolerances) -> CMat {
    let r = m.nrows();
    if m.ncols() == 0 {
        return eye(r);
    }
    if r == 0 {
        return zeros(0, 0);
    }
    let svd = to_faer(m).svd();
    let u = from_faer(&svd.u().to_owned());
    let sd = svd.s_diagonal();
    let k = sd.nrows();
    let smax = if k > 0 { sd.read(0).re } else { 0.0 };
    let rank = if smax == 0.0 {
        0
    } else {
        (0..k)
            .filter(|&l| sd.read(l).re >= tol.rank_tol * smax)
            .count()
    };
    u.slice(s![.., rank..]).to_owned()
}

// ---------------------------------------------------------------------------
// Stein / Sylvester solves
// ---------------------------------------------------------------------------

/// Solve the displacement equation `X − A X B = Q` by dense vectorization.
///
/// Requires ρ(A)·ρ(B) < 1 so the solution is unique; `A` is m×m, `B` is n×n,
/// `Q` and `X` are m×n.
pub fn solve_displacement(a: &CMat, b: &CMat, q: &CMat) -> Result<CMat> {
    let m = a.nrows();
    let n = b.nrows();
    if a.ncols() != m || b.ncols() != n {
        return Err(Error::Dimension("solve_displacement: A, B must be square".into()));
    }
    if q.nrows() != m || q.ncols() != n {
        return Err(Error::Dimension(format!(
            "solve_displacement: Q is {}x{}, expected {}x{}",
            q.nrows(),
            q.ncols(),
            m,
            n
        )));
    }
    let rho = spectral_radius(a) * spectral_radius(b);
    if rho >= 1.0 {
        return Err(Error::Unstable { rho });
    }
    if m == 0 || n == 0 {
        return Ok(zeros(m, n));
    }
    // Row-major vec: idx(i,j) = i*n + j.  The equation reads
    //   X[i,j] − Σ_{k,l} A[i,k] X[k,l] B[l,j] = Q[i,j].
    let dim = m * n;
    let mut sys = zeros(dim, dim);
    for i in 0..m {
        for j in 0..n {
            let row = i * n + j;
            sys[(row, row)] += Complex64::new(1.0, 0.0);
            for k in 0..m {
                let aik = a[(i, k)];
                if aik == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for l in 0..n {
                    sys[(row, k * n + l)] -= aik * b[(l, j)];
                }
            }
        }
    }
    let rhs = Array2::from_shape_fn((dim, 1), |(r, _)| q[(r / n, r % n)]);
    let sol = lin_solve(&sys, &rhs)?;
    Ok(Array2::from_shape_fn((m, n), |(i, j)| sol[(i * n + j, 0)]))
}

/// Solve the Stein equation `P − T* P T = Q` for Hermitian `Q`.
///
/// The solution is the observability-type Gramian `Σ_n T*ⁿ Q Tⁿ`; it is
/// Hermitian (the output is symmetrized to remove roundoff) and the residual
/// is checked against `residual_tol`.
pub fn solve_stein(t: &CMat, q: &CMat, tol: &Tolerances) -> Result<CMat> {
    let n = t.nrows();
    if t.ncols() != n || q.nrows() != n || q.ncols() != n {
        return Err(Error::Dimension(
            "solve_stein: T and Q must be square of equal size".into(),
        ));
    }
    let ts = adjoint(t);
    let p = solve_displacement(&ts, t, q)?;
    let p = (&p + &adjoint(&p)).mapv(|v| v * 0.5);
    let resid = fro_norm(&(&p - &ts.dot(&p).dot(t) - q));
    if resid > tol.residual_tol * (1.0 + fro_norm(q)) {
        return Err(Error::Singular(format!(
            "Stein residual {resid:.3e} exceeds tolerance"
        )));
    }
    Ok(p)
}

// ---------------------------------------------------------------------------
// Schur complement
// ---------------------------------------------------------------------------

/// Which pivot block of the 2×2 partition to eliminate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchurPivot {
    UpperLeft,
    LowerRight,
}

/// Schur complement of a Hermitian matrix partitioned as
/// `[[A, B],[B*, D]]` with `A` of size `split`×`split`.
///
/// Pivot `UpperLeft` returns `D − B* A⁺ B`; pivot `LowerRight` returns
/// `A − B D⁺ B*`.  Pseudoinverses cover singular pivots.
pub fn schur_complement(
    m: &CMat,
    split: usize,
    pivot: SchurPivot,
    tol: &Tolerances,
) -> Result<CMat> {
    let n = m.nrows();
    if m.ncols() != n || split > n {
        return Err(Error::Dimension(
            "schur_complement: invalid partition".into(),
        ));
    }
    let a = m.slice(s![..split, ..split]).to_owned();
    let b = m.slice(s![..split, split..]).to_owned();
    let c = m.slice(s![split.., ..split]).to_owned();
    let d = m.slice(s![split.., split..]).to_owned();
    Ok(match pivot {
        SchurPivot::UpperLeft => &d - &c.dot(&pinv(&a, tol)).dot(&b),
        SchurPivot::LowerRight => &a - &b.dot(&pinv(&d, tol)).dot(&c),
    })
}

/// Combined positivity test: `M ⪰ 0` iff the pivot block and its Schur
/// complement are both PSD (with range compatibility absorbed into the
/// pseudoinverse complement).
pub fn schur_psd_test(m: &CMat, split: usize, pivot: SchurPivot, tol: &Tolerances) -> Result<bool> {
    let n = m.nrows();
    let a = m.slice(s![..split, ..split]).to_owned();
    let d = m.slice(s![split.., split..]).to_owned();
    let b = m.slice(s![..split, split..]).to_owned();
    let comp = schur_complement(m, split, pivot, tol)?;
    let (pivot_block, off) = match pivot {
        SchurPivot::UpperLeft => (a, b.clone()),
        SchurPivot::LowerRight => (d, adjoint(&b)),
    };
    let pivot_ok = psd_check(&pivot_block, tol)?.is_psd;
    let comp_ok = psd_check(&comp, tol)?.is_psd;
    // Range condition: the off-diagonal block must lie in the range of the
    // pivot, i.e. (I − ΠΠ*)·off ≈ 0 with Π the pivot's range projector.
    let (range, _) = range_basis(&pivot_block, tol);
    let proj = range.dot(&adjoint(&range));
    let leak = fro_norm(&(&off - &proj.dot(&off)));
    let range_ok = leak <= tol.residual_tol.sqrt() * (1.0 + fro_norm(&off));
    let _ = n;
    Ok(pivot_ok && comp_ok && range_ok)
}

// ---------------------------------------------------------------------------
// Unitary completion
// ---------------------------------------------------------------------------

/// Complete an isometric column block `V` (rows ≥ cols, `V*V = I`) to a
/// square unitary whose first columns equal `V`.
///
/// The added columns are produced by Gram–Schmidt on the standard basis in a
/// fixed order, so the completion is deterministic.
pub fn unitary_completion(v: &CMat, tol: &Tolerances) -> Result<CMat> {
    let (r, c) = (v.nrows(), v.ncols());
    if r < c {
        return Err(Error::Precondition(format!(
            "unitary_completion: more columns ({c}) than rows ({r})"
        )));
    }
    let gram_resid = fro_norm(&(&adjoint(v).dot(v) - &eye(c)));
    if gram_resid > tol.residual_tol.max(1e-8) {
        return Err(Error::Precondition(format!(
            "unitary_completion: columns not isometric (residual {gram_resid:.3e})"
        )));
    }
    let mut cols: Vec<CVec> = (0..c).map(|j| v.slice(s![.., j]).to_owned()).collect();
    // Deterministic Gram–Schmidt over the standard basis e_0, e_1, …
    for k in 0..r {
        if cols.len() == r {
            break;
        }
        let mut cand: CVec = Array1::from_shape_fn(r, |i| {
            Complex64::new(if i == k { 1.0 } else { 0.0 }, 0.0)
        });
        for _ in 0..2 {
            for col in &cols {
                let coef: Complex64 = col.iter().zip(cand.iter()).map(|(a, b)| a.conj() * b).sum();
                cand = &cand - &col.mapv(|v| v * coef);
            }
        }
        let nrm = vec_norm(&cand);
        if nrm > 1e-8 {
            cols.push(cand.mapv(|v| v / nrm));
        }
    }
    if cols.len() != r {
        return Err(Error::Internal(
            "unitary_completion: failed to span the complement".into(),
        ));
    }
    let mut u = zeros(r, r);
    for (j, col) in cols.iter().enumerate() {
        for i in 0..r {
            u[(i, j)] = col[i];
        }
    }
    let unit_resid = fro_norm(&(&adjoint(&u).dot(&u) - &eye(r)));
    if unit_resid > tol.residual_tol.max(1e-8) {
        return Err(Error::Internal(format!(
            "unitary_completion: output not unitary (residual {unit_resid:.3e})"
        )));
    }
    Ok(u)
}

// ---------------------------------------------------------------------------
// Small construction helpers used across modules
// ---------------------------------------------------------------------------

/// Column vector as an n×1 matrix.
pub fn col(v: &CVec) -> CMat {
    let n = v.len();
    Array2::from_shape_fn((n, 1), |(i, _)| v[i])
}

/// Build a matrix from rows of blocks; all blocks in a row must share height,
/// all blocks in a column must share width.
pub fn block(rows: &[&[&CMat]]) -> CMat {
    let row_heights: Vec<usize> = rows.iter().map(|r| r[0].nrows()).collect();
    let col_widths: Vec<usize> = rows[0].iter().map(|b| b.ncols()).collect();
    let total_r: usize = row_heights.iter().sum();
    let total_c: usize = col_widths.iter().sum();
    let mut out = zeros(total_r, total_c);
    let mut roff = 0;
    for (ri, row) in rows.iter().enumerate() {
        let mut coff = 0;
        for (ci, blk) in row.iter().enumerate() {
            assert_eq!(blk.nrows(), row_heights[ri], "block row height mismatch");
            assert_eq!(blk.ncols(), col_widths[ci], "block column width mismatch");
            out.slice_mut(s![roff..roff + blk.nrows(), coff..coff + blk.ncols()])
                .assign(blk);
            coff += blk.ncols();
        }
        roff += row_heights[ri];
    }
    out
}

/// Scalar 1×1 matrix.
pub fn scalar(v: Complex64) -> CMat {
    Array2::from_elem((1, 1), v)
}
