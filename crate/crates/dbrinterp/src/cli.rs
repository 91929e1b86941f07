//! Command-line front end: problem-spec ingestion, solving, verification
//! reports, and grid-sample emission.
//!
//! Problem specs are JSON files with `"schema": 1`, a `"kind"` field
//! (`"aip"`, `"np"`, `"cf"`, `"h2"`, `"boundary"`, or `"intersection"`),
//! complex numbers as `[re, im]` pairs, and matrices as row-major nested
//! arrays.  All emitted floats carry 17 significant digits so repeated runs
//! with the same configuration produce byte-identical artifacts.
//!
//! Exit codes: 0 solved/verified, 1 unsolvable or constraint violation,
//! 2 input error.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde_json::Value;

use crate::aipdata::{check_admissible, compute_p_oap, interp_functional, solvability, AipDataSet};
use crate::boundary::{solve_boundary, BoundaryDataSet};
use crate::homint::intersection_space;
use crate::numlin::{vec_norm, Tolerances};
use crate::oap::{cf_data, h2_solve, np_data, oap_to_aip};
use crate::rational::{blaschke, certify_schur_default, Realization, SchurFunction};
use crate::redheffer::{build_colligation, realize_from_taylor};
use crate::solve::{aip_solve, solve_inverse_route};
use crate::{CMat, CVec, Error, Result};

#[derive(Parser)]
#[command(name = "dbrinterp", about = "Norm-constrained interpolation in de Branges–Rovnyak spaces", disable_version_flag = true)]
struct Cli {
    /// TOML config file with a [tolerances] table (also: DBRINTERP_CONFIG).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override the rank tolerance.
    #[arg(long, global = true)]
    tol_rank: Option<f64>,
    /// Override the positive-semidefiniteness tolerance.
    #[arg(long, global = true)]
    tol_psd: Option<f64>,
    /// Override the residual tolerance.
    #[arg(long, global = true)]
    tol_residual: Option<f64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a problem spec and report admissibility and solvability.
    Check { spec: PathBuf },
    /// Solve a problem spec and write the solution artifact.
    Solve {
        spec: PathBuf,
        /// JSON file with a realization for the free parameter h.
        #[arg(long, conflicts_with = "central")]
        param: Option<PathBuf>,
        /// Use the minimal-norm (central) solution h = 0 (the default).
        #[arg(long)]
        central: bool,
        /// Output path (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample a solved realization on a polar grid and emit CSV.
    Eval {
        result: PathBuf,
        /// Grid as RADIIxANGLES, e.g. 4x16: radii 0.9·i/R, angles 2πj/A.
        #[arg(long, default_value = "4x16")]
        grid: String,
        /// Output path (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the version.
    Version,
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_entry() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let tol = match load_tolerances(&cli) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let outcome = match &cli.cmd {
        Cmd::Check { spec } => cmd_check(spec, &tol),
        Cmd::Solve {
            spec,
            param,
            central: _,
            out,
        } => cmd_solve(spec, param.as_deref(), out.as_deref(), &tol),
        Cmd::Eval { result, grid, out } => cmd_eval(result, grid, out.as_deref()),
        Cmd::Version => {
            println!("dbrinterp {}", env!("CARGO_PKG_VERSION"));
            Ok(0)
        }
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Unsolvable { .. } | Error::NotAdmissible(_) | Error::Domain(_) => 1,
                _ => 2,
            }
        }
    }
}

fn load_tolerances(cli: &Cli) -> Result<Tolerances> {
    let mut tol = Tolerances::default();
    let path = cli
        .config
        .clone()
        .or_else(|| std::env::var_os("DBRINTERP_CONFIG").map(PathBuf::from));
    if let Some(p) = path {
        let text = std::fs::read_to_string(&p)?;
        let table: toml::Value = text
            .parse()
            .map_err(|e| Error::Input(format!("config {}: {e}", p.display())))?;
        if let Some(t) = table.get("tolerances") {
            if let Some(v) = t.get("rank_tol").and_then(|v| v.as_float()) {
                tol.rank_tol = v;
            }
            if let Some(v) = t.get("psd_tol").and_then(|v| v.as_float()) {
                tol.psd_tol = v;
            }
            if let Some(v) = t.get("residual_tol").and_then(|v| v.as_float()) {
                tol.residual_tol = v;
            }
        }
    }
    if let Some(v) = cli.tol_rank {
        tol.rank_tol = v;
    }
    if let Some(v) = cli.tol_psd {
        tol.psd_tol = v;
    }
    if let Some(v) = cli.tol_residual {
        tol.residual_tol = v;
    }
    tol.validate()?;
    Ok(tol)
}

// ---------------------------------------------------------------------------
// JSON helpers (deterministic 17-significant-digit output).

fn fmt_f(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_c(z: Complex64) -> String {
    format!("[{},{}]", fmt_f(z.re), fmt_f(z.im))
}

fn mat_json(m: &CMat) -> String {
    let rows: Vec<String> = m
        .rows()
        .into_iter()
        .map(|r| {
            let cells: Vec<String> = r.iter().map(|&z| fmt_c(z)).collect();
            format!("[{}]", cells.join(","))
        })
        .collect();
    format!("[{}]", rows.join(","))
}

fn realization_json(r: &Realization) -> String {
    format!(
        "{{\"a\":{},\"b\":{},\"c\":{},\"d\":{}}}",
        mat_json(&r.a),
        mat_json(&r.b),
        mat_json(&r.c),
        mat_json(&r.d)
    )
}

fn get<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key)
        .ok_or_else(|| Error::Input(format!("missing field \"{key}\"")))
}

fn as_f64(v: &Value, ctx: &str) -> Result<f64> {
    v.as_f64()
        .ok_or_else(|| Error::Input(format!("{ctx}: expected a number")))
}

fn parse_c(v: &Value, ctx: &str) -> Result<Complex64> {
    let arr = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| Error::Input(format!("{ctx}: expected [re, im]")))?;
    Ok(Complex64::new(
        as_f64(&arr[0], ctx)?,
        as_f64(&arr[1], ctx)?,
    ))
}

fn parse_cvec(v: &Value, ctx: &str) -> Result<CVec> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Input(format!("{ctx}: expected an array")))?;
    let mut out = Vec::with_capacity(arr.len());
    for e in arr {
        out.push(parse_c(e, ctx)?);
    }
    Ok(ndarray::Array1::from_vec(out))
}

fn parse_cmat(v: &Value, ctx: &str) -> Result<CMat> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::Input(format!("{ctx}: expected a nested array")))?;
    let nrows = rows.len();
    let mut data: Vec<Complex64> = Vec::new();
    let mut ncols = None;
    for row in rows {
        let r = parse_cvec(row, ctx)?;
        match ncols {
            None => ncols = Some(r.len()),
            Some(n) if n != r.len() => {
                return Err(Error::Input(format!("{ctx}: ragged rows")));
            }
            _ => {}
        }
        data.extend(r.iter().copied());
    }
    let ncols = ncols.unwrap_or(0);
    ndarray::Array2::from_shape_vec((nrows, ncols), data)
        .map_err(|e| Error::Input(format!("{ctx}: {e}")))
}

fn parse_realization(v: &Value, ctx: &str) -> Result<Realization> {
    Realization::new(
        parse_cmat(get(v, "a")?, ctx)?,
        parse_cmat(get(v, "b")?, ctx)?,
        parse_cmat(get(v, "c")?, ctx)?,
        parse_cmat(get(v, "d")?, ctx)?,
    )
}

fn parse_blaschke(v: &Value, ctx: &str, tol: &Tolerances) -> Result<SchurFunction> {
    let zeros = parse_cvec(get(v, "zeros")?, ctx)?;
    let phase = match v.get("phase") {
        Some(p) => parse_c(p, ctx)?,
        None => Complex64::new(1.0, 0.0),
    };
    blaschke(zeros.as_slice().unwrap(), phase, tol)
}

fn read_spec(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)?;
    let v: Value = serde_json::from_str(&text)
        .map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    let schema = get(&v, "schema")?.as_i64();
    if schema != Some(1) {
        return Err(Error::Input(format!(
            "{}: unsupported schema {schema:?}",
            path.display()
        )));
    }
    Ok(v)
}

fn spec_schur(v: &Value, tol: &Tolerances) -> Result<SchurFunction> {
    if let Some(b) = v.get("s_blaschke") {
        parse_blaschke(b, "s_blaschke", tol)
    } else if let Some(r) = v.get("s") {
        Ok(certify_schur_default(
            parse_realization(r, "s")?,
            tol,
        ))
    } else {
        Ok(certify_schur_default(Realization::zero(1, 1), tol))
    }
}

// ---------------------------------------------------------------------------
// Problem assembly.

enum Problem {
    Aip(AipDataSet),
    H2 { e: CMat, t: CMat, x: CVec },
    Boundary(BoundaryDataSet),
    Intersection { s: SchurFunction, b: SchurFunction },
}

fn build_problem(v: &Value, tol: &Tolerances) -> Result<Problem> {
    let kind = get(v, "kind")?
        .as_str()
        .ok_or_else(|| Error::Input("\"kind\" must be a string".into()))?;
    match kind {
        "aip" => {
            let s = spec_schur(v, tol)?;
            Ok(Problem::Aip(AipDataSet::new(
                s,
                parse_cmat(get(v, "t")?, "t")?,
                parse_cmat(get(v, "e")?, "e")?,
                parse_cmat(get(v, "n")?, "n")?,
                parse_cvec(get(v, "x")?, "x")?,
                tol,
            )?))
        }
        "np" => {
            let nodes = parse_cvec(get(v, "nodes")?, "nodes")?;
            let targets = parse_cvec(get(v, "targets")?, "targets")?;
            let (t, e, x) = np_data(nodes.as_slice().unwrap(), targets.as_slice().unwrap())?;
            let s = spec_schur(v, tol)?;
            Ok(Problem::Aip(oap_to_aip(s, t, e, x, tol)?))
        }
        "cf" => {
            let point = parse_c(get(v, "point")?, "point")?;
            let coeffs = parse_cvec(get(v, "coefficients")?, "coefficients")?;
            let (t, e, x) = cf_data(point, coeffs.as_slice().unwrap())?;
            let s = spec_schur(v, tol)?;
            Ok(Problem::Aip(oap_to_aip(s, t, e, x, tol)?))
        }
        "h2" => Ok(Problem::H2 {
            e: parse_cmat(get(v, "e")?, "e")?,
            t: parse_cmat(get(v, "t")?, "t")?,
            x: parse_cvec(get(v, "x")?, "x")?,
        }),
        "boundary" => {
            let s = parse_blaschke(get(v, "blaschke")?, "blaschke", tol)?;
            let angles: Vec<f64> = get(v, "angles")?
                .as_array()
                .ok_or_else(|| Error::Input("angles: expected an array".into()))?
                .iter()
                .map(|a| as_f64(a, "angles"))
                .collect::<Result<_>>()?;
            let orders: Vec<usize> = get(v, "orders")?
                .as_array()
                .ok_or_else(|| Error::Input("orders: expected an array".into()))?
                .iter()
                .map(|a| {
                    a.as_u64()
                        .map(|u| u as usize)
                        .ok_or_else(|| Error::Input("orders: expected integers".into()))
                })
                .collect::<Result<_>>()?;
            let targets: Vec<Vec<Complex64>> = get(v, "targets")?
                .as_array()
                .ok_or_else(|| Error::Input("targets: expected an array".into()))?
                .iter()
                .map(|row| parse_cvec(row, "targets").map(|r| r.to_vec()))
                .collect::<Result<_>>()?;
            Ok(Problem::Boundary(BoundaryDataSet::new(
                s, angles, orders, targets,
            )?))
        }
        "intersection" => Ok(Problem::Intersection {
            s: parse_blaschke(get(v, "s_blaschke")?, "s_blaschke", tol)?,
            b: parse_blaschke(get(v, "b_blaschke")?, "b_blaschke", tol)?,
        }),
        other => Err(Error::Input(format!("unknown kind \"{other}\""))),
    }
}

// ---------------------------------------------------------------------------
// check

fn cmd_check(spec_path: &Path, tol: &Tolerances) -> Result<i32> {
    let v = read_spec(spec_path)?;
    let problem = build_problem(&v, tol)?;
    let (report, ok) = match &problem {
        Problem::Aip(data) => {
            let p = compute_p_oap(data, tol)?;
            let rep = check_admissible(data, &p, tol)?;
            let sv = solvability(&p, &data.x, tol)?;
            let ok = rep.is_admissible(tol) && sv.solvable;
            (
                format!(
                    "{{\"schema\":1,\"kind\":\"check\",\"admissible\":{},\"stein_residual\":{},\
                     \"membership_min_eig\":{},\"solvable\":{},\"margin\":{}}}",
                    rep.is_admissible(tol),
                    fmt_f(rep.stein_residual),
                    fmt_f(rep.fs_membership_min_eig),
                    sv.solvable,
                    fmt_f(sv.margin)
                ),
                ok,
            )
        }
        Problem::H2 { e, t, x } => {
            let p = crate::aipdata::obs_gramian(e, t, tol)?;
            let sv = solvability(&p, x, tol)?;
            (
                format!(
                    "{{\"schema\":1,\"kind\":\"check\",\"admissible\":true,\"solvable\":{},\
                     \"margin\":{}}}",
                    sv.solvable,
                    fmt_f(sv.margin)
                ),
                sv.solvable,
            )
        }
        Problem::Boundary(bd) => {
            let p = crate::boundary::compute_p_boundary(bd, tol)?;
            let (_, _, _, x) = crate::boundary::build_boundary_data(bd)?;
            let sv = solvability(&p, &x, tol)?;
            (
                format!(
                    "{{\"schema\":1,\"kind\":\"check\",\"admissible\":true,\"solvable\":{},\
                     \"margin\":{}}}",
                    sv.solvable,
                    fmt_f(sv.margin)
                ),
                sv.solvable,
            )
        }
        Problem::Intersection { s, b } => {
            let m = intersection_space(s, b, tol)?;
            let dim = m.parameter_space_dim(tol)?;
            (
                format!(
                    "{{\"schema\":1,\"kind\":\"check\",\"admissible\":true,\"solvable\":true,\
                     \"parameter_space_dim\":{dim},\"recovery_residual\":{}}}",
                    fmt_f(m.recovery_worst)
                ),
                true,
            )
        }
    };
    println!("{report}");
    Ok(if ok { 0 } else { 1 })
}

// ---------------------------------------------------------------------------
// solve

fn fit_family<F>(eval: F, q: usize) -> Result<Realization>
where
    F: Fn(Complex64) -> Result<CMat>,
{
    let r = 0.6f64;
    let npts = 512usize;
    let mut samples = Vec::with_capacity(npts);
    for k in 0..npts {
        let th = 2.0 * std::f64::consts::PI * (k as f64) / (npts as f64);
        samples.push(eval(Complex64::from_polar(r, th))?);
    }
    let mut coeffs: Vec<CMat> = Vec::new();
    for j in 0..160 {
        let mut acc = crate::numlin::zeros(q, 1);
        for (k, smp) in samples.iter().enumerate() {
            let th = -2.0 * std::f64::consts::PI * (j as f64) * (k as f64) / (npts as f64);
            let ph = Complex64::from_polar(1.0, th);
            acc = &acc + &smp.mapv(|v| v * ph);
        }
        let coeff = acc.mapv(|v| v / (npts as f64) / r.powi(j));
        if crate::numlin::op_norm(&coeff) > 1e3 {
            break;
        }
        coeffs.push(coeff);
    }
    realize_from_taylor(&coeffs, q, 1)
}

fn write_artifact(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn cmd_solve(spec_path: &Path, param: Option<&Path>, out: Option<&Path>, tol: &Tolerances) -> Result<i32> {
    let v = read_spec(spec_path)?;
    let problem = build_problem(&v, tol)?;
    let h = match param {
        Some(p) => {
            let pv = read_spec(p)?;
            Some(parse_realization(get(&pv, "realization")?, "realization")?)
        }
        None => None,
    };
    let artifact = match &problem {
        Problem::Aip(data) => {
            let p = compute_p_oap(data, tol)?;
            let rep = check_admissible(data, &p, tol)?;
            if !rep.is_admissible(tol) {
                return Err(Error::NotAdmissible(format!("{rep:?}")));
            }
            let sv = solvability(&p, &data.x, tol)?;
            if !sv.solvable {
                return Err(Error::Unsolvable { margin: sv.margin });
            }
            let col = build_colligation(&p, &data.t, &data.e, &data.n, tol)?;
            let family = aip_solve(data, &col, h, tol)?;
            // Prefer the exact rational form of the central solution when P
            // is invertible; otherwise fit the family's samples.
            let f = if family.h.is_none()
                && crate::numlin::psd_check(&p, tol)?.min_eigenvalue > tol.psd_tol
            {
                solve_inverse_route(data, &p, tol)?.f_min
            } else {
                fit_family(|z| family.eval(z), data.s.output_dim())?
            };
            let resid = vec_norm(&(&interp_functional(data, &f)? - &data.x));
            let norm = crate::rational::h2_norm(&f)?;
            let d = &col.dims;
            format!(
                "{{\"schema\":1,\"kind\":\"solution\",\"problem_kind\":\"aip\",\
                 \"realization\":{},\"verification\":{{\"solvable\":true,\"margin\":{},\
                 \"budget\":{},\"uniqueness\":\"{:?}\",\"case\":\"{:?}\",\
                 \"colligation_dims\":{{\"x0\":{},\"delta\":{},\"delta_star\":{},\"p\":{},\"q\":{}}},\
                 \"interp_residual\":{},\"h2_norm\":{}}}}}",
                realization_json(&f),
                fmt_f(sv.margin),
                fmt_f(family.budget),
                family.uniqueness,
                family.case_tag,
                d.x0,
                d.delta,
                d.delta_star,
                d.p,
                d.q,
                fmt_f(resid),
                fmt_f(norm)
            )
        }
        Problem::H2 { e, t, x } => {
            let sol = h2_solve(e, t, x, tol)?;
            let f = match &h {
                None => sol.f_min.clone(),
                Some(hf) => {
                    let hn = crate::rational::h2_norm(hf)?;
                    if hn > sol.budget + tol.psd_tol.max(1e-8).sqrt() {
                        return Err(Error::Domain(format!(
                            "parameter norm ‖h‖ = {hn:.6} exceeds the budget {:.6}",
                            sol.budget
                        )));
                    }
                    sol.f_min.add(&sol.b.realization.mul(hf)?)?
                }
            };
            let s0 = certify_schur_default(Realization::zero(e.nrows(), 1), tol);
            let data = oap_to_aip(s0, t.clone(), e.clone(), x.clone(), tol)?;
            let resid = vec_norm(&(&interp_functional(&data, &f)? - x));
            let sv = solvability(&sol.p, x, tol)?;
            format!(
                "{{\"schema\":1,\"kind\":\"solution\",\"problem_kind\":\"h2\",\
                 \"realization\":{},\"inner_b\":{},\"verification\":{{\"solvable\":true,\
                 \"margin\":{},\"budget\":{},\"interp_residual\":{},\"h2_norm\":{}}}}}",
                realization_json(&f),
                realization_json(&sol.b.realization),
                fmt_f(sv.margin),
                fmt_f(sol.budget),
                fmt_f(resid),
                fmt_f(crate::rational::h2_norm(&f)?)
            )
        }
        Problem::Boundary(bd) => {
            if h.is_some() {
                return Err(Error::Input(
                    "--param is not supported for boundary specs; the artifact \
                     reports the central solution"
                        .into(),
                ));
            }
            let sol = solve_boundary(bd, tol)?;
            let f = fit_family(|z| sol.family.eval(z), 1)?;
            let mut radial_rows = Vec::new();
            let eval = |z: Complex64| -> Result<Complex64> {
                Ok(sol.family.eval(z)?[(0, 0)])
            };
            for (i, &th) in bd.angles.iter().enumerate() {
                let got = crate::boundary::radial_taylor(
                    &eval,
                    Complex64::from_polar(1.0, th),
                    bd.orders[i],
                )?;
                for j in 0..=bd.orders[i] {
                    radial_rows.push(format!(
                        "{{\"angle\":{},\"order\":{},\"target\":{},\"achieved\":{},\
                         \"residual\":{}}}",
                        fmt_f(th),
                        j,
                        fmt_c(bd.targets[i][j]),
                        fmt_c(got[j]),
                        fmt_f((got[j] - bd.targets[i][j]).norm())
                    ));
                }
            }
            format!(
                "{{\"schema\":1,\"kind\":\"solution\",\"problem_kind\":\"boundary\",\
                 \"realization\":{},\"verification\":{{\"solvable\":true,\"margin\":{},\
                 \"budget\":{},\"radial_worst\":{},\"radial\":[{}]}}}}",
                realization_json(&f),
                fmt_f(sol.solvability.margin),
                fmt_f(sol.family.budget),
                fmt_f(sol.radial_worst),
                radial_rows.join(",")
            )
        }
        Problem::Intersection { .. } => {
            return Err(Error::Input(
                "kind \"intersection\" has no solve action; use `check`".into(),
            ));
        }
    };
    write_artifact(out, &artifact)?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// eval

fn parse_grid(grid: &str) -> Result<(usize, usize)> {
    let (r, a) = grid
        .split_once(['x', 'X'])
        .ok_or_else(|| Error::Input(format!("grid \"{grid}\": expected RADIIxANGLES")))?;
    let r: usize = r
        .parse()
        .map_err(|_| Error::Input(format!("grid \"{grid}\": bad radius count")))?;
    let a: usize = a
        .parse()
        .map_err(|_| Error::Input(format!("grid \"{grid}\": bad angle count")))?;
    if r == 0 || a == 0 {
        return Err(Error::Input("grid counts must be positive".into()));
    }
    Ok((r, a))
}

fn cmd_eval(result_path: &Path, grid: &str, out: Option<&Path>) -> Result<i32> {
    let v = read_spec(result_path)?;
    let f = parse_realization(get(&v, "realization")?, "realization")?;
    let (nr, na) = parse_grid(grid)?;
    let q = f.output_dim();
    let mut text = String::new();
    if q == 1 {
        text.push_str("z_re,z_im,f_re,f_im,f_abs\n");
    } else {
        text.push_str("z_re,z_im");
        for k in 0..q {
            text.push_str(&format!(",f{k}_re,f{k}_im,f{k}_abs"));
        }
        text.push('\n');
    }
    // Deterministic order: radius-major, angle-minor.
    for i in 1..=nr {
        let r = 0.9 * (i as f64) / (nr as f64);
        for j in 0..na {
            let th = 2.0 * std::f64::consts::PI * (j as f64) / (na as f64);
            let z = Complex64::from_polar(r, th);
            text.push_str(&format!("{},{}", fmt_f(z.re), fmt_f(z.im)));
            match f.eval(z) {
                Ok(val) => {
                    for k in 0..q {
                        let w = val[(k, 0)];
                        text.push_str(&format!(
                            ",{},{},{}",
                            fmt_f(w.re),
                            fmt_f(w.im),
                            fmt_f(w.norm())
                        ));
                    }
                }
                Err(_) => {
                    for _ in 0..q {
                        text.push_str(",pole,pole,pole");
                    }
                }
            }
            text.push('\n');
        }
    }
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn float_formatting_is_17_significant_digits() {
        assert_eq!(fmt_f(4.0 / 3.0), "1.3333333333333333e0");
        assert_eq!(fmt_f(0.0), "0.0000000000000000e0");
        assert_eq!(fmt_f(-0.25), "-2.5000000000000000e-1");
    }

    #[test]
    fn complex_round_trip() {
        let z = c(0.25, -1.5);
        let v: Value = serde_json::from_str(&fmt_c(z)).unwrap();
        assert_eq!(parse_c(&v, "t").unwrap(), z);
    }

    #[test]
    fn matrix_round_trip() {
        let m = ndarray::array![[c(1.0, 2.0), c(0.0, 0.0)], [c(-0.5, 0.25), c(3.0, -4.0)]];
        let v: Value = serde_json::from_str(&mat_json(&m)).unwrap();
        let back = parse_cmat(&v, "m").unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn realization_round_trip() {
        let r = Realization::new(
            crate::numlin::scalar(c(0.5, 0.1)),
            crate::numlin::scalar(c(1.0, 0.0)),
            crate::numlin::scalar(c(0.75, 0.0)),
            crate::numlin::scalar(c(0.0, -0.25)),
        )
        .unwrap();
        let v: Value = serde_json::from_str(&realization_json(&r)).unwrap();
        let back = parse_realization(&v, "r").unwrap();
        assert_eq!(back.a, r.a);
        assert_eq!(back.b, r.b);
        assert_eq!(back.c, r.c);
        assert_eq!(back.d, r.d);
    }

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("4x16").unwrap(), (4, 16));
        assert_eq!(parse_grid("1X2").unwrap(), (1, 2));
        assert!(parse_grid("0x4").is_err());
        assert!(parse_grid("4").is_err());
    }

    #[test]
    fn np_spec_builds() {
        let tol = Tolerances::default();
        let v: Value = serde_json::from_str(
            r#"{"schema":1,"kind":"np","nodes":[[0.5,0.0]],"targets":[[1.0,0.0]]}"#,
        )
        .unwrap();
        match build_problem(&v, &tol).unwrap() {
            Problem::Aip(data) => {
                assert_eq!(data.dim(), 1);
                assert!((data.t[(0, 0)] - c(0.5, 0.0)).norm() < 1e-14);
            }
            _ => panic!("wrong kind"),
        }
    }

    #[test]
    fn boundary_spec_builds() {
        let tol = Tolerances::default();
        let v: Value = serde_json::from_str(
            r#"{"schema":1,"kind":"boundary","blaschke":{"zeros":[[0.0,0.0]]},
                "angles":[0.0],"orders":[0],"targets":[[[0.5,0.0]]]}"#,
        )
        .unwrap();
        match build_problem(&v, &tol).unwrap() {
            Problem::Boundary(bd) => assert_eq!(bd.total_dim(), 1),
            _ => panic!("wrong kind"),
        }
    }

    #[test]
    fn bad_schema_rejected() {
        let dir = std::env::temp_dir().join("dbrinterp-cli-test");
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("bad_schema.json");
        std::fs::write(&p, r#"{"schema":2,"kind":"np"}"#).unwrap();
        assert!(matches!(read_spec(&p), Err(Error::Input(_))));
        let p2 = dir.join("not_json.json");
        std::fs::write(&p2, "{").unwrap();
        assert!(matches!(read_spec(&p2), Err(Error::Input(_))));
    }

    #[test]
    fn unknown_kind_rejected() {
        let tol = Tolerances::default();
        let v: Value = serde_json::from_str(r#"{"schema":1,"kind":"mystery"}"#).unwrap();
        assert!(build_problem(&v, &tol).is_err());
    }
}
