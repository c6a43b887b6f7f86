//! Acceptance suite: one pass/fail line per criterion, nonzero exit on any failure.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use extremal_kit::chebyshev::{
    annulus_reduction, min_enclosing_ball, support_identity_residual, verify_certificate,
    ChebyshevResult, DEFAULT_TOL,
};
use extremal_kit::generators::{
    example1, example1_cauchy, example2, orthonormal_family, union, FamilyId, FamilySpec,
};
use extremal_kit::geometry::{diameter, distance, Ball, PointSet};
use extremal_kit::jung::{jung_constant, regular_simplex, tail_simplex_bound, HILBERT_JUNG};
use extremal_kit::mnc::{
    covering_radius, mnc_profile, partition_diameter, sphere_slice, sphere_slice_mnc, ProfileMode,
    ProfileOptions,
};
use extremal_kit::simplex::{
    extract_exact, extract_greedy, extremality_witness, ExtractMode, ExtractionOutcome,
};

type Outcome = Result<String, String>;

/// Every solved instance of criteria 1-3, for the support-identity check.
type Solved = Vec<(PointSet, ChebyshevResult)>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    check(elapsed < limit, || {
        format!("runtime {elapsed:?} exceeds {limit:?}")
    })
}

fn solve(points: &PointSet, solved: &mut Solved) -> Result<ChebyshevResult, String> {
    let res = min_enclosing_ball(points, DEFAULT_TOL).map_err(|e| e.to_string())?;
    check(verify_certificate(points, &res, DEFAULT_TOL), || {
        "certificate rejected".into()
    })?;
    solved.push((points.clone(), res.clone()));
    Ok(res)
}

fn c1_jung_equality(solved: &mut Solved) -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0_f64;
    for n in 1..=12 {
        let s = regular_simplex(n, 1.0).map_err(|e| e.to_string())?;
        let res = solve(&s, solved)?;
        let ratio = res.radius / diameter(&s);
        let want = (n as f64 / (2.0 * (n as f64 + 1.0))).sqrt();
        worst = worst.max((ratio - want).abs());
        check((ratio - want).abs() <= 1e-9, || {
            format!("n={n}: ratio {ratio}, expected {want}")
        })?;
    }
    let t = start.elapsed();
    within(t, Duration::from_secs(1))?;
    Ok(format!("n=1..12, max |ratio - J| = {worst:.1e}, {t:.2?}"))
}

fn c2_strict_bound(solved: &mut Solved) -> Outcome {
    let start = Instant::now();
    let mut max_ratio = 0.0_f64;
    for seed in 0..500u64 {
        let m = 2 + (seed as usize * 7919) % 49;
        let d = 1 + (seed as usize * 104_729) % 30;
        let pts = random_set(seed, m, d, seed % 3 == 0);
        let res = solve(&pts, solved)?;
        let diam = diameter(&pts);
        let q = d.min(pts.distinct_count() - 1);
        let jung = jung_constant(q).map_err(|e| e.to_string())?;
        check(res.radius < diam * HILBERT_JUNG, || {
            format!("seed {seed}: r = {} not < d/√2", res.radius)
        })?;
        check(res.radius <= diam * jung + 1e-7, || {
            format!("seed {seed}: Jung bound violated")
        })?;
        max_ratio = max_ratio.max(res.radius / diam);
    }
    let t = start.elapsed();
    within(t, Duration::from_secs(30))?;
    Ok(format!(
        "500 sets, max r/d = {max_ratio:.6} < {HILBERT_JUNG:.6}, {t:.2?}"
    ))
}

fn c3_annulus(solved: &mut Solved) -> Outcome {
    let start = Instant::now();
    let (mut dr_max, mut dc_max) = (0.0_f64, 0.0_f64);
    for seed in 0..100u64 {
        let m = 5 + (seed as usize % 40);
        let d = 2 + (seed as usize % 12);
        let pts = random_set(10_000 + seed, m, d, seed % 2 == 0);
        let res = solve(&pts, solved)?;
        for frac in [0.9, 0.5, 0.2, 0.05, 0.01] {
            let reduced =
                annulus_reduction(&pts, &res, frac * res.radius).map_err(|e| e.to_string())?;
            let sub = solve(&reduced, solved)?;
            let dr = (sub.radius - res.radius).abs();
            let dc = distance(&sub.center, &res.center);
            dr_max = dr_max.max(dr);
            dc_max = dc_max.max(dc);
            check(dr <= 1e-7 && dc <= 1e-6, || {
                format!("seed {seed}, ε = {frac}·r: Δr {dr:e}, Δc {dc:e}")
            })?;
        }
    }
    let t = start.elapsed();
    within(t, Duration::from_secs(60))?;
    Ok(format!(
        "100 sets x 5 ε, max Δr = {dr_max:.1e}, max Δc = {dc_max:.1e}, {t:.2?}"
    ))
}

fn c4_support_identity(solved: &Solved) -> Outcome {
    let mut worst = 0.0_f64;
    for (pts, res) in solved {
        let r2 = res.radius * res.radius;
        let rel = support_identity_residual(pts, res) / r2;
        worst = worst.max(rel);
        check(rel <= 1e-6, || {
            format!("residual {rel:e}·r² on a {}-point set", pts.len())
        })?;
    }
    Ok(format!(
        "{} instances, max residual = {worst:.1e}·r²",
        solved.len()
    ))
}

fn c5_forward_trend() -> Outcome {
    let start = Instant::now();
    let mut cells = 0;
    for m in [8, 32, 128] {
        let pts = orthonormal_family(m).map_err(|e| e.to_string())?;
        for eps in [0.3, 0.1, 0.01] {
            for p in 1..=20.min(m - 1) {
                let out = extract_greedy(&pts, 2f64.sqrt() - eps, p).map_err(|e| e.to_string())?;
                check(out.certificate().is_some(), || {
                    format!("m={m} ε={eps} p={p}: not found")
                })?;
                cells += 1;
            }
        }
    }
    let pts = orthonormal_family(128).map_err(|e| e.to_string())?;
    let w = extremality_witness(&pts, &[0.01], &[20], ExtractMode::Greedy)
        .map_err(|e| e.to_string())?;
    let lb = w.witness_lower_bound.ok_or("no witness at m=128, p=20")?;
    check(lb >= 0.975, || format!("witness lower bound {lb} < 0.975"))?;
    let t = start.elapsed();
    within(t, Duration::from_secs(30))?;
    Ok(format!(
        "{cells} cells found, witness(128, 20, 0.01) = {lb:.7}, {t:.2?}"
    ))
}

fn c6_tail_bound() -> Outcome {
    let ps = [1usize, 2, 5, 10, 100];
    let ns = [4u64, 16, 100, 1_000_000];
    let mut worst = 0.0_f64;
    for &n in &ns {
        let mut prev = -1.0;
        for &p in &ps {
            let got = tail_simplex_bound(p, n).map_err(|e| e.to_string())?;
            let (pf, nf) = (p as f64, n as f64);
            let want = ((2.0 - 4.0 / nf.sqrt()) * pf / (2.0 * (pf + 1.0))).sqrt();
            worst = worst.max((got - want).abs());
            check((got - want).abs() <= 1e-12, || {
                format!("(p={p}, n={n}): {got} vs {want}")
            })?;
            // At n = 4 the bound is identically 0; beyond that it strictly increases.
            let increasing = if n > 4 { got > prev } else { got >= prev };
            check(increasing, || {
                format!("not monotone in p at (p={p}, n={n})")
            })?;
            prev = got;
        }
    }
    let far = tail_simplex_bound(10_000, 100_000_000).map_err(|e| e.to_string())?;
    check(far > 0.999, || format!("bound(1e4, 1e8) = {far}"))?;
    Ok(format!(
        "20 grid points, max error {worst:.1e}, value at (1e4, 1e8) = {far:.6}"
    ))
}

fn c7_exact_oracles() -> Outcome {
    let start = Instant::now();
    let mut comparisons = 0;
    for seed in 0..50u64 {
        let m = 4 + (seed as usize % 9);
        let pts = random_set(20_000 + seed, m, 1 + (seed as usize % 5), seed % 4 == 0);
        let diam = diameter(&pts);
        for frac in [0.2, 0.45, 0.65, 0.85, 1.0] {
            let t = frac * diam;
            let omega = brute_max_clique(&pts, t);
            for p in 1..m {
                let ok = match extract_exact(&pts, t, p).map_err(|e| e.to_string())? {
                    ExtractionOutcome::Found(c) => omega > p && c.min_edge >= t,
                    ExtractionOutcome::NotFound { best_size, .. } => {
                        omega <= p && best_size == omega
                    }
                };
                check(ok, || {
                    format!("seed {seed} m={m} t={t} p={p}: disagrees with enumeration (ω={omega})")
                })?;
                comparisons += 1;
            }
        }
    }
    let radius = |s: &PointSet| if s.len() == 1 { 0.0 } else { brute_meb(s).1 };
    let mut profile_cells = 0;
    for (m, k) in [(6, 2), (8, 2), (9, 3)] {
        let mut sets = vec![orthonormal_family(m).map_err(|e| e.to_string())?];
        for s in 0..3 {
            sets.push(random_set(30_000 + 10 * m as u64 + s, m, 3, false));
        }
        for pts in &sets {
            let rho = covering_radius(pts, k, ProfileMode::Exact)
                .map_err(|e| e.to_string())?
                .value;
            let delta = partition_diameter(pts, k, ProfileMode::Exact)
                .map_err(|e| e.to_string())?
                .value;
            let rho_o = brute_partition_value(pts, k, radius);
            let delta_o = brute_partition_value(pts, k, brute_diameter);
            check((rho - rho_o).abs() <= 1e-9, || {
                format!("(m={m}, k={k}): rho {rho} vs oracle {rho_o}")
            })?;
            check((delta - delta_o).abs() <= 1e-12, || {
                format!("(m={m}, k={k}): delta {delta} vs oracle {delta_o}")
            })?;
            profile_cells += 1;
        }
    }
    let t = start.elapsed();
    within(t, Duration::from_secs(300))?;
    Ok(format!(
        "{comparisons} extraction cells, {profile_cells} profile cells agree, {t:.2?}"
    ))
}

fn c8_profile_trend() -> Outcome {
    let spec = FamilySpec::new(FamilyId::Orthonormal, 1);
    let (covers, parts, _) = mnc_profile(&spec, &[8, 16, 32], &[2, 4], &ProfileOptions::default())
        .map_err(|e| e.to_string())?;
    let mut prev_rho4 = 0.0;
    for (c, p) in covers.iter().zip(&parts) {
        let m = c.m;
        for (ce, pe) in c.entries.iter().zip(&p.entries) {
            let k = ce.k;
            check(pe.delta == 2f64.sqrt(), || {
                format!("delta({k}, {m}) = {}", pe.delta)
            })?;
            let want = (1.0 - k as f64 / m as f64).sqrt();
            check((ce.rho - want).abs() <= 1e-9, || {
                format!("rho({k}, {m}) = {}, expected {want}", ce.rho)
            })?;
            if k == 4 {
                check(ce.rho > prev_rho4, || format!("rho(4, {m}) not increasing"))?;
                prev_rho4 = ce.rho;
            }
        }
    }
    // Brute-force validation of the closed form at (8, 2).
    let pts = orthonormal_family(8).map_err(|e| e.to_string())?;
    let oracle =
        brute_partition_value(&pts, 2, |s| if s.len() == 1 { 0.0 } else { brute_meb(s).1 });
    let exact = covering_radius(&pts, 2, ProfileMode::Exact)
        .map_err(|e| e.to_string())?
        .value;
    check(
        (oracle - 0.75f64.sqrt()).abs() <= 1e-9 && (exact - oracle).abs() <= 1e-9,
        || format!("(8, 2): exact {exact}, oracle {oracle}"),
    )?;
    Ok(format!(
        "delta = √2 on 6 cells, rho(4, m) = {:.7}/{:.7}/{:.7}",
        covers[0].entries[1].rho, covers[1].entries[1].rho, covers[2].entries[1].rho
    ))
}

fn c9_examples() -> Outcome {
    let mut worst = 0.0_f64;
    for gamma in [0.3, 1.0, 2f64.sqrt()] {
        let a = example2(gamma, 32).map_err(|e| e.to_string())?;
        for i in 0..32 {
            for j in i + 1..32 {
                let err = (distance(a.point(i), a.point(j)) - gamma).abs();
                worst = worst.max(err);
                check(err <= 1e-12, || {
                    format!("γ={gamma}: pair ({i}, {j}) off by {err:e}")
                })?;
            }
        }
    }
    let x = example1_cauchy(32).map_err(|e| e.to_string())?;
    for p in x.iter() {
        let err = (p.iter().map(|v| v * v).sum::<f64>().sqrt() - 1.0).abs();
        worst = worst.max(err);
        check(err <= 1e-12, || format!("Cauchy norm off by {err:e}"))?;
    }
    for gamma in [0.3, 1.0, 2f64.sqrt()] {
        let u = union(&[
            example1(16).map_err(|e| e.to_string())?,
            example2(gamma, 16).map_err(|e| e.to_string())?,
        ])
        .map_err(|e| e.to_string())?;
        let sphere = Ball::new(vec![0.0; u.dim()], 1.0).map_err(|e| e.to_string())?;
        let idx = sphere_slice(&u, &sphere, 1e-9).map_err(|e| e.to_string())?;
        check(idx == (16..32).collect::<Vec<_>>(), || {
            format!("γ={gamma}: slice {idx:?}")
        })?;
        let prof = sphere_slice_mnc(&u, &sphere, 1e-9).map_err(|e| e.to_string())?;
        for e in prof.entries.iter().filter(|e| e.k < 16) {
            check((e.delta - gamma).abs() <= 1e-12, || {
                format!("γ={gamma}: slice delta({}) = {}", e.k, e.delta)
            })?;
        }
    }
    Ok(format!(
        "example2 / Cauchy max error {worst:.1e}; slice delta = γ for γ in {{0.3, 1, √2}}"
    ))
}

fn c10_cli() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_extremal-kit");
    let run = |args: &[&str]| {
        Command::new(bin)
            .args(args)
            .env_remove("EXTREMAL_KIT_THREADS")
            .output()
            .map_err(|e| e.to_string())
    };
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = |name: &str| dir.path().join(name).to_str().unwrap().to_string();

    let cloud = path("cloud.csv");
    let family = [
        "--family",
        "random-sphere",
        "--m",
        "25",
        "--param",
        "dim=9",
        "--seed",
        "5",
    ];
    let mut args = vec!["generate", "--out", cloud.as_str()];
    args.extend(family);
    check(run(&args)?.status.success(), || "generate failed".into())?;
    let text = std::fs::read_to_string(&cloud).map_err(|e| e.to_string())?;
    let parsed = extremal_kit::cli::parse_point_cloud(&text).map_err(|e| e.to_string())?;
    let built = FamilySpec::new(FamilyId::RandomSphere, 25)
        .param("dim", 9.0)
        .param("seed", 5.0)
        .build()
        .map_err(|e| e.to_string())?;
    let same = parsed
        .as_flat()
        .iter()
        .zip(built.as_flat())
        .all(|(a, b)| a.to_bits() == b.to_bits());
    check(same && parsed.len() == 25, || {
        "parsed cloud differs from the generator bits".into()
    })?;
    let a1 = run(&["analyze", "--input", &cloud])?;
    let mut fam_args = vec!["analyze"];
    fam_args.extend(family);
    let a2 = run(&fam_args)?;
    let report = |o: &std::process::Output| -> Result<serde_json::Value, String> {
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).map_err(|e| e.to_string())?;
        Ok(v["report"].clone())
    };
    check(report(&a1)? == report(&a2)?, || {
        "analyze differs between file and family input".into()
    })?;

    std::fs::write(path("bad.csv"), "0,0\n1,x\n").map_err(|e| e.to_string())?;
    std::fs::write(path("one.csv"), "3,4\n").map_err(|e| e.to_string())?;
    let report_path = path("report.json");
    check(
        run(&[
            "analyze",
            "--family",
            "regular-simplex",
            "--m",
            "4",
            "--out",
            &report_path,
        ])?
        .status
        .success(),
        || "analyze --out failed".into(),
    )?;
    let mut v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
    v["report"]["ratio"] = serde_json::Value::from(0.9);
    std::fs::write(&report_path, v.to_string()).map_err(|e| e.to_string())?;

    let (bad, one, missing) = (path("bad.csv"), path("one.csv"), path("missing.csv"));
    let scenarios: [(&str, Vec<&str>, i32); 6] = [
        ("malformed CSV", vec!["analyze", "--input", &bad], 2),
        ("missing file", vec!["analyze", "--input", &missing], 2),
        ("singleton input", vec!["analyze", "--input", &one], 3),
        (
            "p ≥ m",
            vec!["extract", "--family", "orthonormal", "--m", "5", "--p", "5"],
            3,
        ),
        (
            "pivot budget",
            vec![
                "analyze",
                "--family",
                "orthonormal",
                "--m",
                "60",
                "--max-pivots",
                "1",
            ],
            4,
        ),
        (
            "corrupted report",
            vec!["verify", "--input", &report_path],
            5,
        ),
    ];
    for (name, args, want) in &scenarios {
        let got = run(args)?.status.code();
        check(got == Some(*want), || {
            format!("{name}: exit {got:?}, expected {want}")
        })?;
    }
    Ok("round trip bit-stable; exit codes 2,2,3,3,4,5 as documented".into())
}

fn main() {
    let mut solved = Solved::new();
    let mut results: Vec<(&str, Outcome)> = Vec::new();
    let mut guard = |name: &'static str, f: &mut dyn FnMut() -> Outcome| {
        let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let (tag, detail) = match &r {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!("{tag} {name}: {detail}");
        results.push((name, r));
    };
    guard("1 Jung equality", &mut || c1_jung_equality(&mut solved));
    guard("2 strict Hilbert bound", &mut || {
        c2_strict_bound(&mut solved)
    });
    guard("3 annulus reduction", &mut || c3_annulus(&mut solved));
    guard("4 support identity", &mut || c4_support_identity(&solved));
    guard("5 long-edge simplices", &mut c5_forward_trend);
    guard("6 tail simplex bound", &mut c6_tail_bound);
    guard("7 exact oracles", &mut c7_exact_oracles);
    guard("8 profile trend", &mut c8_profile_trend);
    guard("9 example fidelity", &mut c9_examples);
    guard("10 CLI contract", &mut c10_cli);
    let failed = results.iter().filter(|(_, r)| r.is_err()).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
