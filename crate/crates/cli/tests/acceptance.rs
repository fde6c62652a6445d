//! One PASS/FAIL line per acceptance criterion.
//!
//! A criterion whose FAIL is a documented property of the data (not of the
//! code) is reported as FAIL but does not fail the process, provided every
//! observed fact matches the documented explanation.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::cell::Cell;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use serde_json::Value;

use orw_core::coloring::decide_blue_closed_3;
use orw_core::ramsey::{brute_force_ramsey, builtin, verify_witness};
use orw_core::upper::{check_proof, decide_catalogue, parse_dimacs, DecideOptions};

enum Verdict {
    Pass(String),
    Fail(String),
    /// FAIL whose cause is understood and was observed exactly as documented.
    KnownFail(String),
}

type Check = Result<String, String>;

fn orw(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_orw"))
        .arg("--json")
        .args(args)
        .env_remove("ORW_TABLE")
        .output()
        .expect("orw runs");
    let code = out.status.code().unwrap_or(-1);
    let json = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (code, json)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn scratch() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("orw-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("scratch dir");
    dir
}

fn criterion_1() -> Check {
    let mut times = Vec::new();
    for n in 3..=5u32 {
        let start = Instant::now();
        let (code, out) = orw(&["lower", "verify", "-n", &n.to_string()]);
        let t = start.elapsed();
        ensure(code == 0, || format!("n = {n}: exit {code}"))?;
        let report = &out["report"];
        ensure(report["pass"] == true, || format!("n = {n}: report fails: {report}"))?;
        for stage in ["triangle-free", "blue-3", "red-omega-plus-n"] {
            let s = report["stages"].as_array().and_then(|v| v.iter().find(|s| s["name"] == stage));
            ensure(s.is_some_and(|s| s["pass"] == true), || format!("n = {n}: stage {stage} missing or failing"))?;
        }
        let control = &out["control"];
        ensure(control["pass"] == true && control["witness"]["checked"] == true, || {
            format!("n = {n}: no checked red closed w+{} copy: {control}", n - 1)
        })?;
        ensure(t < Duration::from_secs(10), || format!("n = {n}: {t:?}"))?;
        times.push(format!("n={n} {:.2}s", t.as_secs_f64()));
    }
    Ok(format!("lower verify passes with positive control ({})", times.join(", ")))
}

fn criterion_2() -> Check {
    let mut notes = Vec::new();
    for (n, expected, limit) in [(3u32, 6u32, 300u64), (4, 9, 300)] {
        let start = Instant::now();
        let rec = brute_force_ramsey(n).map_err(|e| e.to_string())?;
        let t = start.elapsed();
        ensure(rec.value() == expected, || format!("R({n},3) computed as {}", rec.value()))?;
        verify_witness(rec.witness(), n).map_err(|e| format!("R({n},3) witness: {e:?}"))?;
        ensure(rec.witness().order() == expected - 1, || format!("R({n},3) witness order {}", rec.witness().order()))?;
        ensure(t < Duration::from_secs(limit), || format!("R({n},3) took {t:?}"))?;
        notes.push(format!("R({n},3)={} in {:.2}s", rec.value(), t.as_secs_f64()));
    }
    let start = Instant::now();
    let c13 = builtin(5).map_err(|e| e.to_string())?;
    verify_witness(c13.witness(), 5).map_err(|e| format!("C13(1,5): {e:?}"))?;
    let t = start.elapsed();
    ensure(t < Duration::from_secs(1), || format!("C13(1,5) took {t:?}"))?;
    notes.push(format!("C13(1,5) verified in {:.3}s", t.as_secs_f64()));
    Ok(notes.join(", "))
}

fn criterion_3() -> Check {
    let dir = scratch();
    let mut notes = Vec::new();
    for (n, mode, k) in [(3u32, "ramsey", 7u32), (3, "square", 5), (4, "ramsey", 15), (4, "square", 12)] {
        let start = Instant::now();
        let (code, out) = orw(&["upper", "replay", "-n", &n.to_string(), "--k", mode, "--budget", "10000000"]);
        let t = start.elapsed();
        let label = format!("n = {n}, K = {k}");
        ensure(out["k"] == k, || format!("{label}: CLI chose K = {}", out["k"]))?;
        let status = &out["main"]["status"];
        if status == "sat" {
            return Err(format!("{label}: SAT, catalogue gap; model {}", out["main"]["model"]));
        }
        ensure(code == 0 && out["pass"] == true, || format!("{label}: exit {code}, status {status}"))?;
        ensure(out["main"]["trace"]["verified"] == true, || format!("{label}: trace not verified"))?;

        // Re-check the proof against the clause system as read back from DIMACS.
        let file = dir.join(format!("n{n}k{k}.cnf"));
        let file_arg = file.to_string_lossy().into_owned();
        let (code, _) = orw(&["upper", "dimacs", "-n", &n.to_string(), "-K", &k.to_string(), "-o", &file_arg]);
        ensure(code == 0, || format!("{label}: dimacs export exit {code}"))?;
        let (_, cnf) = parse_dimacs(&std::fs::read_to_string(&file).map_err(|e| e.to_string())?)?;
        let report = decide_catalogue(n, k, &[], DecideOptions::default()).map_err(|e| e.to_string())?;
        ensure(!report.lazy_c8, || format!("{label}: expected eager C8"))?;
        let proof = report.proof.ok_or_else(|| format!("{label}: no proof"))?;
        let check = check_proof(&cnf, &proof, |_, _| false).map_err(|e| format!("{label}: {e}"))?;
        notes.push(format!("({n},{k}) unsat, {} resolutions, {:.2}s", check.resolutions, t.as_secs_f64()));
    }
    for (n, k) in [(3u32, 7u32), (4, 15)] {
        let (code, out) =
            orw(&["upper", "decide", "-n", &n.to_string(), "-K", &k.to_string(), "--drop", "C8"]);
        ensure(code == 1 && out["status"] == "sat" && out["model"].is_object(), || {
            format!("without C8 at ({n},{k}): exit {code}, status {}", out["status"])
        })?;
    }
    notes.push("dropping C8 gives SAT with a model at (3,7) and (4,15)".into());
    let _ = std::fs::remove_dir_all(&dir);
    Ok(notes.join("; "))
}

fn square_flags(table: Option<&Path>) -> Result<Vec<(u64, String, Value)>, String> {
    let table_arg;
    let mut args = vec![];
    if let Some(p) = table {
        table_arg = p.to_string_lossy().into_owned();
        args.extend(["--table", table_arg.as_str()]);
    }
    args.extend(["bounds", "--nmax", "8"]);
    let (code, out) = orw(&args);
    ensure(code == 0, || format!("bounds exit {code}"))?;
    let rows = out.as_array().ok_or("bounds output is not a list")?;
    Ok(rows
        .iter()
        .map(|r| {
            (r["n"].as_u64().unwrap_or(0), r["square_better"].as_str().unwrap_or("").to_string(), r["ramsey_values_used"].clone())
        })
        .collect())
}

fn criterion_4() -> Verdict {
    let run = || -> Result<(String, bool), String> {
        let rows = square_flags(None)?;
        for (n, flag, used) in &rows {
            for (m, u) in used.as_object().ok_or("no ramsey_values_used")? {
                let m: u32 = m.parse().map_err(|_| "bad key")?;
                let want = if m <= 4 { "computed" } else { "external" };
                ensure(u["provenance"] == want, || format!("n = {n}: R({m},3) flagged {}", u["provenance"]))?;
            }
            if *n <= 7 {
                ensure(flag == "yes", || format!("n = {n}: square < ramsey is {flag}"))?;
            }
        }
        let (_, flag8, used8) = rows.iter().find(|r| r.0 == 8).ok_or("no row for n = 8")?;
        if flag8 != "yes" {
            return Ok((format!("square < ramsey for 3..7, n = 8 gives {flag8}"), true));
        }
        // The shipped table has R(13,3) >= 60, so w*60 < w*(R(13,3)+1) already.
        ensure(used8["13"]["value"]["lower"] == 60, || format!("unexpected R(13,3) entry {}", used8["13"]))?;
        let old = scratch().join("table59.json");
        let text = include_str!("../../core/data/ramsey_table.json").replace(
            r#""13": { "lower": 60, "upper": 68"#,
            r#""13": { "lower": 59, "upper": 68"#,
        );
        std::fs::write(&old, text).map_err(|e| e.to_string())?;
        let flag_old = square_flags(Some(&old))?.into_iter().find(|r| r.0 == 8).map(|r| r.1);
        ensure(flag_old.as_deref() == Some("unknown"), || format!("with R(13,3) >= 59 the flag is {flag_old:?}"))?;
        Ok((
            "square < ramsey for 3..7 as claimed, but n = 8 is also yes: the configured R(13,3) >= 60 forces \
             w*60 < w*(R(13,3)+1); with the older bound R(13,3) >= 59 the flag is unknown, never no"
                .into(),
            false,
        ))
    };
    match run() {
        Ok((detail, true)) => Verdict::Pass(detail),
        Ok((detail, false)) => Verdict::KnownFail(detail),
        Err(e) => Verdict::Fail(e),
    }
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        Config { cases, failure_persistence: None, ..Config::default() },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

fn criterion_5() -> Check {
    use support::*;
    let fail = |name: &str, e: String| format!("{name}: {e}");

    runner(1000)
        .run(&(small_ordinal(), small_ordinal(), small_ordinal()), |(a, b, c)| {
            check_ordinal_laws(&a, &b, &c).map_err(TestCaseError::fail)
        })
        .map_err(|e| fail("ordinal laws", e.to_string()))?;

    for r in 0..=5 {
        for m in 0..=2 {
            check_f_set(r, m).map_err(|e| fail("F-sets", e))?;
        }
    }

    let found = Cell::new(0);
    runner(200)
        .run(&coloring_seed(&SHAPES, 0.3), |seed| {
            let c = build_coloring(&seed);
            found.set(found.get() + u32::from(decide_blue_closed_3(&c).is_some()));
            check_blue3(&c).map_err(TestCaseError::fail)
        })
        .map_err(|e| fail("blue-3", e.to_string()))?;

    runner(100)
        .run(&coloring_seed(&["w^2*2 + 1"], 0.5), |seed| check_skeleton(&build_coloring(&seed)).map_err(TestCaseError::fail))
        .map_err(|e| fail("skeleton", e.to_string()))?;

    let unsat = Cell::new(0);
    runner(500)
        .run(&cnf_system(), |(nvars, cnf)| {
            unsat.set(unsat.get() + u32::from(orw_core::upper::truth_table_sat(nvars, &cnf).is_none()));
            check_solver(nvars, &cnf).map_err(TestCaseError::fail)
        })
        .map_err(|e| fail("solver", e.to_string()))?;

    check_g3_bridge().map_err(|e| fail("G_3 bridge", e))?;
    Ok(format!(
        "1000 ordinal cases, 18 F-sets, 200 colorings ({} with a blue 3), 100 skeletons, 500 CNFs ({} unsat), G_3 bridge",
        found.get(),
        unsat.get()
    ))
}

fn main() -> ExitCode {
    let criteria: [(u32, fn() -> Verdict); 5] = [
        (1, || from_check(criterion_1())),
        (2, || from_check(criterion_2())),
        (3, || from_check(criterion_3())),
        (4, criterion_4),
        (5, || from_check(criterion_5())),
    ];
    let mut ok = true;
    for (i, f) in criteria {
        match f() {
            Verdict::Pass(d) => println!("PASS criterion {i}: {d}"),
            Verdict::KnownFail(d) => println!("FAIL criterion {i}: {d}"),
            Verdict::Fail(d) => {
                ok = false;
                println!("FAIL criterion {i}: {d}");
            }
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn from_check(c: Check) -> Verdict {
    match c {
        Ok(d) => Verdict::Pass(d),
        Err(d) => Verdict::Fail(d),
    }
}
