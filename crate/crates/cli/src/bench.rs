use std::io::Write as _;
use std::time::Instant;

use num_traits::One;
use rayon::prelude::*;
use vcsp::duality::{separate, verify_overcast, OvercastSearch, DEFAULT_MAP_BUDGET};
use vcsp::exact::{solve_naive, DEFAULT_NAIVE_BUDGET};
use vcsp::fixtures;
use vcsp::lp::SolveMode;
use vcsp::maxsa::solve_sa;
use vcsp::minbaker::{apex_then, baker_minimise, min_ptas_planar, planar_bfs, BakerOptions, PtasOptions};
use vcsp::value::{fmt_rational, int, rat, Rational};
use vcsp::{ExtRat, Mode, PartialAssignment, Result, ValuedStructure, VcspError};

use crate::report::{RunReport, CSV_HEADER};
use crate::solve::exact_value;
use crate::{BenchArgs, Suite};

struct Row {
    report: RunReport,
    ok: bool,
}

type Case = Box<dyn Fn() -> Result<Row> + Send + Sync>;

fn within(v: &ExtRat, o: &ExtRat, factor: &Rational) -> bool {
    match (v, o) {
        (ExtRat::Finite(v), ExtRat::Finite(o)) => *v <= o * factor,
        (ExtRat::PosInf, ExtRat::PosInf) => true,
        (ExtRat::Finite(_), ExtRat::PosInf) => true,
        _ => false,
    }
}

fn naive_max(a: &ValuedStructure, c: &ValuedStructure) -> Result<ExtRat> {
    Ok(solve_naive(a, c, Mode::Max, &PartialAssignment::empty(a.size()), DEFAULT_NAIVE_BUDGET)?.value)
}

fn min_ptas_grids() -> Vec<Case> {
    let mut cases: Vec<Case> = Vec::new();
    for cols in [10usize, 12] {
        for (p, q) in [(1i64, 1i64), (1, 2)] {
            cases.push(Box::new(move || {
                let a = fixtures::grid_left(4, cols, Some(&int(1)));
                let c = fixtures::vc_structure();
                let eps = rat(p, q);
                let out = min_ptas_planar(&a, &c, &eps, &PtasOptions::default())?;
                let (o, _) = exact_value(&a, &c, Mode::Min, false, None)?;
                let mut r = RunReport::new(format!("vc-grid-4x{cols}"), "ptas", &out.value).with_oracle(&out.value, &o);
                r.eps = Some(fmt_rational(&eps));
                let ok = within(&out.value, &o, &(Rational::one() + &eps)) && out.stats.violations() == 0;
                Ok(Row { report: r, ok })
            }));
        }
    }
    cases
}

fn baker_apex() -> Vec<Case> {
    vec![Box::new(|| {
        let (rows, cols) = (4, 8);
        let a = fixtures::apex_grid_left(rows, cols, Some(&int(1)));
        let c = fixtures::vc_structure();
        let strategy = apex_then(Box::new(planar_bfs(None)), vec![rows * cols]);
        let out = baker_minimise(&a, &c, &int(1), &strategy, &BakerOptions::default())?;
        let (o, _) = exact_value(&a, &c, Mode::Min, false, None)?;
        let mut r = RunReport::new("apex-grid-4x8", "baker", &out.value).with_oracle(&out.value, &o);
        r.eps = Some("1".into());
        let ok = within(&out.value, &o, &int(2)) && out.stats.violations() == 0;
        Ok(Row { report: r, ok })
    })]
}

fn sa_exactness(seed: u64, cases: usize) -> Vec<Case> {
    let mut out: Vec<Case> = vec![Box::new(|| {
        // level 2 on a triangle stays at 3/2 although the optimum is 1
        let a = fixtures::cycle_left(3, &int(1), Some(&int(1)));
        let c = fixtures::is_structure();
        let v = solve_sa(&a, &c, 2, SolveMode::Rational)?.value;
        let o = naive_max(&a, &c)?;
        let mut r = RunReport::new("is-k3-level2", "sa", &v).with_oracle(&v, &o);
        r.level = Some(2);
        Ok(Row {
            ok: v == ExtRat::ratio(3, 2),
            report: r,
        })
    })];
    for i in 0..cases as u64 {
        let s = seed + i;
        out.push(Box::new(move || {
            let (a, c, tw) = fixtures::bounded_tw_max_instance(s, 9, 3);
            let v = solve_sa(&a, &c, tw + 1, SolveMode::Auto)?.value;
            let o = naive_max(&a, &c)?;
            let mut r = RunReport::new(format!("sa-{s}"), "sa", &v).with_oracle(&v, &o);
            r.level = Some(tw + 1);
            r.seed = Some(s);
            Ok(Row { ok: v == o, report: r })
        }));
    }
    out
}

fn sa_linearity(seed: u64, cases: usize) -> Vec<Case> {
    let mut out: Vec<Case> = Vec::new();
    for i in 0..cases as u64 {
        let s = seed + i;
        for (p, q) in [(0i64, 1i64), (1, 2), (2, 1)] {
            out.push(Box::new(move || {
                let (a, c, _) = fixtures::bounded_tw_max_instance(s, 7, 2);
                let lam = rat(p, q);
                let base = solve_sa(&a, &c, 2, SolveMode::Auto)?.value;
                let v = solve_sa(&a.rescale(&lam)?, &c, 2, SolveMode::Auto)?.value;
                // λ·(-inf) stays -inf only for λ > 0; with λ = 0 every tuple vanishes
                let expect = if p == 0 { ExtRat::zero() } else { base.scale(&lam) };
                let mut r = RunReport::new(format!("lin-{s}-x{}", fmt_rational(&lam)), "sa", &v).with_oracle(&v, &expect);
                r.level = Some(2);
                r.seed = Some(s);
                Ok(Row { ok: v == expect, report: r })
            }));
        }
    }
    out
}

fn duality_roundtrip(seed: u64, cases: usize) -> Vec<Case> {
    (0..cases as u64)
        .map(|i| {
            let s = seed + i;
            Box::new(move || {
                let (a, b) = fixtures::random_overcast_pair(s);
                let (verdict, ok) = match vcsp::duality::lp_search(&a, &b, DEFAULT_MAP_BUDGET)?.0 {
                    OvercastSearch::Found(w) => ("omega", verify_overcast(&a, &b, &w) && separate(&a, &b).is_err()),
                    OvercastSearch::Separated(_) => match separate(&a, &b) {
                        Ok(sep) => ("separator", sep.left_value < sep.right_value),
                        Err(_) => ("unresolved", false),
                    },
                };
                let mut r = RunReport::new(format!("pair-{s}"), "duality", &ExtRat::zero());
                r.value = verdict.into();
                r.seed = Some(s);
                Ok(Row { report: r, ok })
            }) as Case
        })
        .collect()
}

fn oracle_concordance(seed: u64, cases: usize) -> Vec<Case> {
    (0..cases as u64)
        .map(|i| {
            let s = seed + i;
            Box::new(move || {
                let (a, c, min) = fixtures::random_instance(s, 8);
                let mode = if min { Mode::Min } else { Mode::Max };
                let (v, _) = exact_value(&a, &c, mode, false, None)?;
                let (o, _) = exact_value(&a, &c, mode, true, None)?;
                let mut r = RunReport::new(format!("inst-{s}-{}", if min { "min" } else { "max" }), "dp", &v).with_oracle(&v, &o);
                r.seed = Some(s);
                Ok(Row { ok: v == o, report: r })
            }) as Case
        })
        .collect()
}

fn clique_reduction(seed: u64, cases: usize) -> Vec<Case> {
    (0..cases as u64)
        .map(|i| {
            let s = seed + i;
            Box::new(move || {
                let n = 3 + (s as usize) % 6;
                let g = fixtures::random_graph(n, 0.5, s);
                let v = naive_max(&fixtures::clique_left(n + 1), &fixtures::max_clique_reduction(&g))?;
                let o = ExtRat::int(fixtures::max_clique_size(&g) as i64);
                let mut r = RunReport::new(format!("graph-{s}-n{n}"), "naive", &v).with_oracle(&v, &o);
                r.seed = Some(s);
                Ok(Row { ok: v == o, report: r })
            }) as Case
        })
        .collect()
}

pub fn run(args: &BenchArgs) -> Result<u8> {
    let cases = |d: usize| args.cases.unwrap_or(d);
    let list: Vec<Case> = match args.suite {
        Suite::MinPtasGrids => min_ptas_grids(),
        Suite::BakerApex => baker_apex(),
        Suite::SaExactness => sa_exactness(args.seed, cases(50)),
        Suite::SaLinearity => sa_linearity(args.seed, cases(10)),
        Suite::DualityRoundtrip => duality_roundtrip(args.seed, cases(100)),
        Suite::OracleConcordance => oracle_concordance(args.seed, cases(200)),
        Suite::CliqueReduction => clique_reduction(args.seed, cases(10)),
    };
    let rows: Vec<Result<Row>> = list
        .par_iter()
        .map(|case| {
            let start = Instant::now();
            let mut row = case()?;
            row.report.ms = (!args.no_timing).then(|| start.elapsed().as_millis() as u64);
            Ok(row)
        })
        .collect();
    let mut text = format!("{CSV_HEADER}\n");
    let mut failed = 0;
    for (i, r) in rows.into_iter().enumerate() {
        match r {
            Ok(row) => {
                if !row.ok {
                    failed += 1;
                    eprintln!("assertion failed: {}", row.report.case);
                }
                text.push_str(&row.report.csv_row());
            }
            Err(e) => {
                failed += 1;
                eprintln!("case {i}: {e}");
                text.push_str(&format!("case-{i},error,,,{},,,", e.to_string().replace(',', ";")));
            }
        }
        text.push('\n');
    }
    match &args.out {
        Some(p) => std::fs::write(p, &text).map_err(|e| VcspError::Input(format!("{}: {e}", p.display())))?,
        None => {
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(text.as_bytes());
        }
    }
    Ok(if failed > 0 { 1 } else { 0 })
}
