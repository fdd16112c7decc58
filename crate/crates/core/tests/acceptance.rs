//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails. Observations that are reported but not
//! enforced are printed as FINDING lines.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Float;
use ruinwalk::dist::DEFAULT_TAIL_TOL;
use ruinwalk::model::{CScenario, PointMassPair};
use ruinwalk::published::{self, CellStatus, Horizon, CELL_TOL};
use ruinwalk::ultimate::DEFAULT_U_BIG;
use ruinwalk::{
    boundary_oracle, build_sequences, determinant_trace, dp_oracle, mc_estimate,
    residuals, survival_finite, survival_ultimate, CaseTag, Conjecture, ModelSpec, Pmf, SolverOptions,
};

/// Residual bound for solved models.
const RESIDUAL_TOL: f64 = 1e-8;
/// Finite recursion versus the dynamic-programming oracle.
const FINITE_ORACLE_TOL: f64 = 1e-10;
/// Recurrence versus the boundary-value oracle.
const ULTIMATE_ORACLE_TOL: f64 = 1e-4;
/// Closed-form case versus the boundary-value oracle.
const CLOSED_FORM_ORACLE_TOL: f64 = 1e-6;
/// Slack for comparisons that hold exactly in real arithmetic; the solved
/// initial values themselves are only accurate to the solver's agreement
/// tolerance of 1e-9.
const ROUNDING_SLACK: f64 = 1e-9;

type Outcome = Result<String, String>;

fn example(id: u8) -> ModelSpec {
    published::table(id).unwrap().model(DEFAULT_TAIL_TOL).unwrap()
}

fn opts() -> SolverOptions {
    SolverOptions::default()
}

/// Random masses on `min..min+len`, with `x_min > 0` guaranteed.
fn random_masses(rng: &mut ChaCha8Rng, min: usize, max_len: usize, decay_hi: f64) -> Vec<f64> {
    let len = rng.random_range(1..=max_len);
    let r: f64 = rng.random_range(0.02..decay_hi);
    let mut w = vec![0.0; min + len];
    for k in 0..len {
        if k == 0 || rng.random_bool(0.8) {
            w[min + k] = rng.random_range(0.2..1.0) * r.powi(k as i32);
        }
    }
    let total: f64 = w.iter().sum();
    w.iter().map(|v| v / total).collect()
}

/// Rounds masses to multiples of 2^-16 so that they sum to exactly 1 in
/// binary; exact-arithmetic properties then hold without an input defect.
fn dyadic(masses: &[f64]) -> Vec<f64> {
    let unit = 65536.0;
    let mut q: Vec<f64> = masses.iter().map(|p| (p * unit).round()).collect();
    let lead = q.iter().position(|&v| v > 0.0).expect("some mass");
    q[lead] += unit - q.iter().sum::<f64>();
    q.iter().map(|v| v / unit).collect()
}

fn pmf(masses: &[f64]) -> Pmf {
    Pmf::from_masses(masses).unwrap()
}

/// Model with the given smallest atoms, `E S ≤ 3.8`.
fn random_net_profit_model(rng: &mut ChaCha8Rng, x_min: usize, y_min: usize) -> ModelSpec {
    loop {
        let m = ModelSpec::new(
            pmf(&random_masses(rng, x_min, 5, 0.8)),
            pmf(&random_masses(rng, y_min, 5, 0.8)),
        );
        if m.margin().value >= 0.2 {
            return m;
        }
    }
}

fn random_dyadic_model(rng: &mut ChaCha8Rng, x_min: usize, y_min: usize) -> ModelSpec {
    loop {
        let m = ModelSpec::new(
            pmf(&dyadic(&random_masses(rng, x_min, 5, 0.8))),
            pmf(&dyadic(&random_masses(rng, y_min, 5, 0.8))),
        );
        if m.margin().value >= 0.2 {
            return m;
        }
    }
}

/// `a ≥ b` up to a relative rounding allowance of 2^-128.
fn ge_rounded(a: &Float, b: &Float) -> bool {
    let d = Float::with_val(a.prec(), a - b);
    let scale = Float::with_val(a.prec(), a.abs_ref()).max(&Float::with_val(a.prec(), b.abs_ref()));
    d >= -(scale >> 128u32)
}

/// Smallest atoms `(min X, min Y)` selecting each net-profit scenario.
const SCENARIOS: [(&str, usize, usize); 10] = [
    ("A", 0, 0),
    ("B", 1, 0),
    ("B", 0, 1),
    ("C.s1", 1, 1),
    ("C.s2", 0, 2),
    ("C.s3", 2, 0),
    ("D.v1", 2, 1),
    ("D.v2", 1, 2),
    ("D.v3", 3, 0),
    ("D.v4", 0, 3),
];

fn random_small_model(rng: &mut ChaCha8Rng) -> ModelSpec {
    // support ≤ 5 with any mean
    let side = |rng: &mut ChaCha8Rng| {
        let min = rng.random_range(0..=3);
        let m = random_masses(rng, min, 6 - min, 1.5);
        pmf(&m)
    };
    let x = side(rng);
    ModelSpec::new(x, side(rng))
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max)
}

fn table_cells(id: u8) -> Result<published::TableReport, String> {
    published::verify_table(published::table(id).unwrap(), DEFAULT_TAIL_TOL, &opts()).map_err(|e| e.to_string())
}

fn describe_failures(r: &published::TableReport) -> String {
    r.cells
        .iter()
        .filter(|c| c.status == CellStatus::Fail)
        .map(|c| format!("{:?} u={} printed {} computed {:.6}", c.horizon, c.u, c.printed, c.computed))
        .collect::<Vec<_>>()
        .join("; ")
}

fn ac1() -> Outcome {
    let start = Instant::now();
    let r = table_cells(1)?;
    let elapsed = start.elapsed().as_secs_f64();
    if !r.ok() {
        return Err(describe_failures(&r));
    }
    if elapsed >= 1.0 {
        return Err(format!("all cells match but took {elapsed:.3} s"));
    }
    Ok(format!("{} cells within ±{CELL_TOL} in {elapsed:.3} s", r.cells.len()))
}

fn ac2() -> Outcome {
    let mut msg = Vec::new();
    for (id, first, last) in [(2, 0.037, 0.935), (3, 0.048, 0.983)] {
        let r = table_cells(id)?;
        if !r.ok() {
            return Err(format!("table {id}: {}", describe_failures(&r)));
        }
        let inf: Vec<_> = r.row(Horizon::Infinite).collect();
        let (a, b) = (inf[0], inf.last().unwrap());
        if (a.computed - first).abs() > CELL_TOL || (b.computed - last).abs() > CELL_TOL {
            return Err(format!("table {id}: ultimate row ends {} .. {}", a.computed, b.computed));
        }
        msg.push(format!("table {id}: {} cells, phi(0)={:.4}, phi(40)={:.4}", r.cells.len(), a.computed, b.computed));
    }
    Ok(msg.join("; "))
}

fn ac3() -> Outcome {
    let r = table_cells(5)?;
    if !r.ok() {
        return Err(describe_failures(&r));
    }
    let res = survival_ultimate(&example(5), 200, &opts()).map_err(|e| e.to_string())?;
    if res.phi.iter().any(|&v| v != 0.0) {
        return Err("ultimate row is not identically zero".into());
    }
    Ok(format!("{} cells match; phi(u)=0 for u<=200 ({})", r.cells.len(), res.case))
}

fn ac4() -> Outcome {
    let m = example(4);
    let res = survival_ultimate(&m, 25, &opts()).map_err(|e| e.to_string())?;
    if res.phi[0] != 0.0 {
        return Err(format!("phi(0) = {:e}", res.phi[0]));
    }
    let want = (1.0 / 6.0) / (-1.0f64 / 3.0).exp();
    if (res.phi[1] - 0.23261).abs() > 1e-5 || (res.phi[1] - want).abs() > 1e-10 {
        return Err(format!("phi(1) = {}", res.phi[1]));
    }
    let r = table_cells(4)?;
    let flagged = r.count(CellStatus::Flagged);
    if !r.ok() || flagged == 0 {
        return Err(format!("expected flagged discrepancies only: {flagged} flagged, {} failed", r.count(CellStatus::Fail)));
    }
    let oracle = boundary_oracle(&m, DEFAULT_U_BIG, 25).map_err(|e| e.to_string())?;
    let gap = max_abs_diff(&oracle, &res.phi);
    if gap >= CLOSED_FORM_ORACLE_TOL {
        return Err(format!("oracle gap {gap:e}"));
    }
    Ok(format!(
        "phi(0)=0, phi(1)={:.6}; {flagged} printed cells flagged, 0 failed; oracle gap {gap:.2e}",
        res.phi[1]
    ))
}

fn ac5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let m = random_small_model(&mut rng);
        let grid = survival_finite(&m, 8, 20);
        for t in 1..=20 {
            for u in 0..=8 {
                worst = worst.max((grid.get(u, t) - dp_oracle(&m, u, t)).abs());
            }
        }
    }
    if worst < FINITE_ORACLE_TOL {
        Ok(format!("100 models, max gap {worst:.2e}"))
    } else {
        Err(format!("max gap {worst:e}"))
    }
}

fn ultimate_models() -> Vec<(String, ModelSpec)> {
    let mut out: Vec<(String, ModelSpec)> = (1..=3).map(|id| (format!("example {id}"), example(id))).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for i in 0..20 {
        let (name, xm, ym) = SCENARIOS[i % SCENARIOS.len()];
        out.push((format!("random {name} #{i}"), random_net_profit_model(&mut rng, xm, ym)));
    }
    out
}

fn ac6() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut cases = std::collections::BTreeSet::new();
    for (name, m) in ultimate_models() {
        let res = survival_ultimate(&m, 40, &opts()).map_err(|e| format!("{name}: {e}"))?;
        let oracle = boundary_oracle(&m, DEFAULT_U_BIG, 40).map_err(|e| format!("{name}: {e}"))?;
        let gap = max_abs_diff(&res.phi, &oracle);
        if gap >= ULTIMATE_ORACLE_TOL {
            return Err(format!("{name} ({}): gap {gap:e}", res.case));
        }
        worst = worst.max(gap);
        cases.insert(res.case.to_string());
    }
    Ok(format!("23 models, cases {cases:?}, max gap {worst:.2e}"))
}

fn ac7() -> Outcome {
    let mut models = ultimate_models();
    models.push(("example 4".into(), example(4)));
    models.push(("example 5".into(), example(5)));
    for i in 0..=4 {
        models.push((format!("point masses {i},{}", 4 - i), ModelSpec::new(Pmf::point_mass(i), Pmf::point_mass(4 - i))));
    }
    let (mut wm, mut wc): (f64, f64) = (0.0, 0.0);
    for (name, m) in &models {
        let res = survival_ultimate(m, 40, &opts()).map_err(|e| format!("{name}: {e}"))?;
        let r = residuals(m, &res.phi);
        if r.master >= RESIDUAL_TOL || r.constraint >= RESIDUAL_TOL {
            return Err(format!("{name}: master {:e}, constraint {:e}", r.master, r.constraint));
        }
        wm = wm.max(r.master);
        wc = wc.max(r.constraint);
    }
    Ok(format!("{} models, max master {wm:.2e}, max constraint {wc:.2e}", models.len()))
}

fn ac8() -> Outcome {
    let mut models = ultimate_models();
    models.push(("example 4".into(), example(4)));
    models.push(("example 5".into(), example(5)));
    let (u_max, t_max) = (40, 100);
    for (name, m) in &models {
        let grid = survival_finite(m, u_max, t_max);
        let ult = survival_ultimate(m, u_max, &opts()).map_err(|e| format!("{name}: {e}"))?.phi;
        for t in 1..=t_max {
            for u in 0..=u_max {
                let v = grid.get(u, t);
                if u < u_max && grid.get(u + 1, t) < v - 1e-12 {
                    return Err(format!("{name}: decreasing in u at (u={u}, T={t})"));
                }
                if t < t_max && grid.get(u, t + 1) > v + 1e-12 {
                    return Err(format!("{name}: increasing in T at (u={u}, T={t})"));
                }
                if v < ult[u] - ROUNDING_SLACK {
                    return Err(format!("{name}: phi(u,T)={v} < phi(u)={} at (u={u}, T={t})", ult[u]));
                }
            }
        }
    }
    let phi15 = survival_ultimate(&example(1), 15, &opts()).map_err(|e| e.to_string())?.phi[15];
    if phi15 <= 0.999 {
        return Err(format!("example 1 phi(15) = {phi15}"));
    }
    Ok(format!("{} models monotone and above phi(u); example 1 phi(15)={phi15:.6}", models.len()))
}

fn ac9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut inside, mut total) = (0, 0);
    let mut misses = Vec::new();
    let trials = 100_000;
    let mut i = 0;
    while i < 20 {
        let m = random_small_model(&mut rng);
        let grid = survival_finite(&m, 30, 30);
        // three points on distinct horizons whose exact value is not degenerate
        let mut points = Vec::new();
        'scan: for t in [3, 10, 25, 2, 5, 20, 1, 30] {
            for u in [1, 4, 10, 0, 2, 6, 15, 25] {
                let p = grid.get(u, t);
                if (0.01..=0.99).contains(&p) && !points.iter().any(|&(_, pt, _)| pt == t) {
                    points.push((u, t, p));
                    if points.len() == 3 {
                        break 'scan;
                    }
                }
            }
        }
        if points.len() < 3 {
            continue;
        }
        for (u, t, exact) in points {
            let seed = 1000 + i as u64;
            let (est, se) = mc_estimate(&m, u, t, trials, seed);
            if mc_estimate(&m, u, t, trials, seed).0 != est {
                return Err(format!("model {i}: same seed gave different estimates"));
            }
            total += 1;
            if (est - exact).abs() < 4.0 * se {
                inside += 1;
            } else {
                misses.push(format!("model {i} (u={u},T={t}): {est} vs {exact:.5} (se {se:.1e})"));
            }
        }
        i += 1;
    }
    let rate = inside as f64 / total as f64;
    for miss in &misses {
        println!("FINDING AC9 outside 4 se: {miss}");
    }
    if total == 60 && rate >= 0.95 {
        Ok(format!("{inside}/{total} within 4 stderr; seeds reproducible"))
    } else {
        Err(format!("{inside}/{total} within 4 stderr"))
    }
}

fn ac10() -> Outcome {
    for i in 0..=4 {
        let m = ModelSpec::new(Pmf::point_mass(i), Pmf::point_mass(4 - i));
        let pair = PointMassPair::from_x_atom(i).unwrap();
        let res = survival_ultimate(&m, 12, &opts()).map_err(|e| e.to_string())?;
        let expected: Vec<f64> = (0..=12).map(|u| if u >= pair.survival_threshold() { 1.0 } else { 0.0 }).collect();
        if res.phi != expected {
            return Err(format!("x_{i}=y_{}=1: {:?}", 4 - i, res.phi));
        }
        // the deterministic surplus also agrees with the finite-time oracle
        for u in 0..=12 {
            if dp_oracle(&m, u, 40) != expected[u] {
                return Err(format!("x_{i}=y_{}=1: finite oracle disagrees at u={u}", 4 - i));
            }
        }
    }
    Ok("x4y0 -> 1{u>=3}, x3y1 -> 1{u>=2}, x2y2/x1y3/x0y4 -> 1{u>=1}".into())
}

fn ac11() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n_max = 100;
    let mut zero_models = 0;
    let mut drop_models = 0;
    let mut sign_models = 0;
    let mut first_sign = None;
    for (which, count, xm, ym) in [(Conjecture::Conjecture1, 50, 0, 0), (Conjecture::Conjecture2, 25, 1, 0)] {
        for i in 0..count {
            let m = random_net_profit_model(&mut rng, xm, ym);
            let trace = determinant_trace(&m, which, n_max, 256).map_err(|e| e.to_string())?;
            let drops = trace.magnitude_drops();
            if !trace.zeros.is_empty() {
                zero_models += 1;
            }
            if !drops.is_empty() {
                drop_models += 1;
            }
            if !trace.violations.is_empty() {
                sign_models += 1;
                first_sign.get_or_insert_with(|| format!("{which:?} model {i}: {}", trace.violations[0].1));
            }
            if !trace.zeros.is_empty() || !drops.is_empty() {
                let vals: Vec<String> = trace.to_f64().iter().map(|v| format!("{v:.3e}")).collect();
                println!(
                    "FINDING AC11 {which:?} model {i}: zeros at {:?}, |D| drops at {drops:?}; trace [{}]",
                    trace.zeros,
                    vals.join(", ")
                );
            }
        }
    }
    println!(
        "FINDING AC11 printed inequalities (signed) fail on {sign_models} of 75 models{}",
        first_sign.map(|s| format!(", e.g. {s}")).unwrap_or_default()
    );
    println!("FINDING AC11 determinant probe: {zero_models} models with a zero determinant, {drop_models} with a parity-class magnitude drop (of 75)");

    // hard properties of case C
    for (scenario, xm, ym) in [(CScenario::S1, 1, 1), (CScenario::S2, 0, 2), (CScenario::S3, 2, 0)] {
        for i in 0..10 {
            let m = random_dyadic_model(&mut rng, xm, ym);
            let tag = m.classify().map_err(|e| e.to_string())?;
            if tag != CaseTag::C(scenario) {
                return Err(format!("generated {tag}, wanted C {scenario:?}"));
            }
            let seq = build_sequences(&m, tag, n_max + 1, 256).map_err(|e| e.to_string())?;
            match scenario {
                CScenario::S1 | CScenario::S2 => {
                    let a = seq.coeff_phi0.as_ref().unwrap();
                    if let Some(n) = (0..=n_max).find(|&n| a[n + 1] == a[n]) {
                        return Err(format!("C {scenario:?} model {i}: alpha-hat difference vanishes at n={n}"));
                    }
                }
                CScenario::S3 => {
                    let a = seq.coeff_phi1.as_ref().unwrap();
                    for n in 0..(n_max - 1) / 2 {
                        let (odd, odd_next) = (&a[2 * n + 1], &a[2 * n + 3]);
                        if !(*odd >= 1 && ge_rounded(odd_next, odd)) {
                            return Err(format!(
                                "C s3 model {i}: odd chain fails at index {}: {:e} vs {:e}; x={:?} y={:?}",
                                2 * n + 1,
                                odd.to_f64(),
                                odd_next.to_f64(),
                                m.x().probs(),
                                m.y().probs()
                            ));
                        }
                        // φ(0) = 0 carries no coefficient; the even chain starts at index 2
                        if n >= 1 {
                            let (even, even_next) = (&a[2 * n], &a[2 * n + 2]);
                            if !(*even <= -1 && ge_rounded(even, even_next)) {
                                return Err(format!(
                                    "C s3 model {i}: even chain fails at index {}: {:e} vs {:e}; x={:?} y={:?}",
                                    2 * n,
                                    even.to_f64(),
                                    even_next.to_f64(),
                                    m.x().probs(),
                                    m.y().probs()
                                ));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(format!(
        "75 traces to n={n_max} computed; case C: 20 alpha-hat sequences nonvanishing differences, 10 alpha-tilde parity chains hold"
    ))
}

fn main() -> ExitCode {
    // the libtest harness passes flags like --nocapture; none apply here
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("AC1 table 1 reproduction", ac1),
        ("AC2 tables 2 and 3 reproduction", ac2),
        ("AC3 table 5 reproduction", ac3),
        ("AC4 table 4 handling", ac4),
        ("AC5 finite oracle equivalence", ac5),
        ("AC6 ultimate oracle equivalence", ac6),
        ("AC7 residual suite", ac7),
        ("AC8 monotone consistency", ac8),
        ("AC9 Monte Carlo concordance", ac9),
        ("AC10 degenerate point-mass patterns", ac10),
        ("AC11 conjecture probe", ac11),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {name} [{secs:.2}s]: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name} [{secs:.2}s]: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
