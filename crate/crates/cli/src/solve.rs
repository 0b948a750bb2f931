use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde::Deserialize;
use serde_json::{json, Value};
use vcsp::exact::{decompose_free, solve_naive, td_solve, Effort, DEFAULT_DP_BUDGET, DEFAULT_NAIVE_BUDGET};
use vcsp::io::read_instance;
use vcsp::lp::SolveMode;
use vcsp::maxsa::{fragile_solve, solve_sa, FractionalModulator};
use vcsp::minbaker::{apex_then, baker_minimise, min_ptas_planar, planar_bfs, BakerOptions, BakerStrategy, PtasOptions};
use vcsp::value::{parse_rational, Rational};
use vcsp::{ExtRat, Instance, Mode, PartialAssignment, Result, ValuedStructure, VcspError};

use crate::report::RunReport;
use crate::{Algo, LpArg, ModeArg, Oracle, SolveArgs};

pub fn mode_of(m: ModeArg) -> Mode {
    match m {
        ModeArg::Min => Mode::Min,
        ModeArg::Max => Mode::Max,
    }
}

pub fn lp_mode(l: LpArg) -> SolveMode {
    match l {
        LpArg::Rational => SolveMode::Rational,
        LpArg::Float => SolveMode::Float,
        LpArg::Auto => SolveMode::Auto,
    }
}

fn algo_name(a: Algo) -> &'static str {
    match a {
        Algo::Naive => "naive",
        Algo::Dp => "dp",
        Algo::Ptas => "ptas",
        Algo::Baker => "baker",
        Algo::Sa => "sa",
        Algo::Fragile => "fragile",
    }
}

/// Exact optimum by either oracle.
pub fn exact_value(a: &ValuedStructure, c: &ValuedStructure, mode: Mode, naive: bool, budget: Option<u64>) -> Result<(ExtRat, Vec<usize>)> {
    let rho = PartialAssignment::empty(a.size());
    let s = if naive {
        solve_naive(a, c, mode, &rho, budget.unwrap_or(DEFAULT_NAIVE_BUDGET))?
    } else {
        let td = decompose_free(a, &rho, Effort::Heuristic)?;
        td_solve(a, c, &td, mode, &rho, budget.unwrap_or(DEFAULT_DP_BUDGET))?
    };
    Ok((s.value, s.assignment))
}

fn ids_of(st: &ValuedStructure, list: &str) -> Result<Vec<usize>> {
    list.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            st.element(s.trim())
                .ok_or_else(|| VcspError::Input(format!("--apex: unknown element {s:?}")))
        })
        .collect()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModulatorFile {
    width: usize,
    parts: Vec<ModulatorPart>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModulatorPart {
    set: Vec<String>,
    p: String,
}

fn read_modulator(path: &Path, a: &ValuedStructure) -> Result<FractionalModulator> {
    let text = std::fs::read_to_string(path).map_err(|e| VcspError::Input(format!("{}: {e}", path.display())))?;
    let f: ModulatorFile = serde_json::from_str(&text).map_err(|e| VcspError::Input(format!("modulator JSON: {e}")))?;
    let parts = f
        .parts
        .iter()
        .map(|p| {
            let set = p
                .set
                .iter()
                .map(|id| a.element(id).ok_or_else(|| VcspError::Input(format!("modulator: unknown element {id:?}"))))
                .collect::<Result<Vec<_>>>()?;
            Ok((set, parse_rational(&p.p)?))
        })
        .collect::<Result<Vec<_>>>()?;
    FractionalModulator::new(parts, f.width)
}

pub fn assignment_json(inst: &Instance, h: &[usize]) -> Value {
    let m: BTreeMap<&str, &str> = h
        .iter()
        .enumerate()
        .map(|(v, &c)| (inst.left.domain()[v].as_str(), inst.right.domain()[c].as_str()))
        .collect();
    json!(m)
}

pub fn run(args: &SolveArgs) -> Result<u8> {
    let inst = read_instance(&args.instance)?;
    let mode = mode_of(args.mode);
    let compatible = match mode {
        Mode::Min => matches!(args.algo, Algo::Naive | Algo::Dp | Algo::Ptas | Algo::Baker),
        Mode::Max => matches!(args.algo, Algo::Naive | Algo::Dp | Algo::Sa | Algo::Fragile),
    };
    if !compatible {
        return Err(VcspError::Input(format!(
            "--algo {} does not apply to --mode {}",
            algo_name(args.algo),
            if mode == Mode::Min { "min" } else { "max" }
        )));
    }
    inst.validate(mode)?;
    let (a, c) = (&inst.left, &inst.right);
    let eps = parse_rational(&args.epsilon).map_err(|_| VcspError::Input(format!("--epsilon: malformed rational {:?}", args.epsilon)))?;
    let start = Instant::now();
    let mut details = serde_json::Map::new();
    let mut report_eps = None;
    let mut report_level = None;
    let (value, assignment): (ExtRat, Option<Vec<usize>>) = match args.algo {
        Algo::Naive | Algo::Dp => {
            let (v, h) = exact_value(a, c, mode, args.algo == Algo::Naive, args.budget)?;
            (v, Some(h))
        }
        Algo::Ptas => {
            report_eps = Some(args.epsilon.clone());
            let opts = PtasOptions {
                budget: args.budget.unwrap_or(DEFAULT_DP_BUDGET),
                ..Default::default()
            };
            let out = min_ptas_planar(a, c, &eps, &opts)?;
            details.insert("k".into(), json!(out.k));
            details.insert("path_len".into(), json!(out.ell));
            details.insert("m".into(), json!(out.m.to_string()));
            details.insert("best_shift".into(), json!(out.best_shift));
            details.insert("max_block_width".into(), json!(out.max_block_width));
            details.insert("blend_violations".into(), json!(out.stats.violations()));
            (out.value, Some(out.assignment))
        }
        Algo::Baker => {
            report_eps = Some(args.epsilon.clone());
            let mut opts = BakerOptions {
                budget: args.budget.unwrap_or(DEFAULT_DP_BUDGET),
                ..Default::default()
            };
            if let Some(w) = args.base_width {
                opts.base_width = w;
            }
            let strategy: Box<dyn BakerStrategy> = match &args.apex {
                Some(list) => Box::new(apex_then(Box::new(planar_bfs(None)), ids_of(a, list)?)),
                None => Box::new(planar_bfs(None)),
            };
            let out = baker_minimise(a, c, &eps, strategy.as_ref(), &opts)?;
            details.insert("rounds".into(), json!(out.rounds));
            details.insert("leaves".into(), json!(out.leaves));
            details.insert("path_len".into(), json!(out.ell));
            details.insert("blend_violations".into(), json!(out.stats.violations()));
            (out.value, Some(out.assignment))
        }
        Algo::Sa => {
            let k = args.level.unwrap_or_else(|| a.signature().max_arity().max(1));
            report_level = Some(k);
            let s = solve_sa(a, c, k, lp_mode(args.lp))?;
            details.insert("certified".into(), json!(s.certified));
            details.insert("num_vars".into(), json!(s.num_vars));
            details.insert("components".into(), json!(s.components.len()));
            (s.value, None)
        }
        Algo::Fragile => {
            let m = match &args.modulator {
                Some(p) => read_modulator(p, a)?,
                None => {
                    let td = decompose_free(a, &PartialAssignment::empty(a.size()), Effort::Heuristic)?;
                    FractionalModulator::new(vec![(Vec::new(), Rational::from_integer(1.into()))], td.width())?
                }
            };
            let out = fragile_solve(a, c, &m, None)?;
            details.insert("best_part".into(), json!(out.best_part));
            details.insert("thinness".into(), json!(m.thinness(a.size()).to_string()));
            (out.value, Some(out.assignment))
        }
    };
    let ms = start.elapsed().as_millis() as u64;

    let case = args.instance.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let mut report = RunReport::new(case, algo_name(args.algo), &value);
    report.eps = report_eps;
    report.level = report_level;
    report.seed = Some(args.seed);
    report.ms = (!args.no_timing).then_some(ms);
    if args.oracle != Oracle::None {
        let (o, _) = exact_value(a, c, mode, args.oracle == Oracle::Naive, args.budget)?;
        report = report.with_oracle(&value, &o);
    }
    let feasible = value.is_finite();
    let out = json!({
        "value": value.to_string(),
        "feasible": feasible,
        "assignment": assignment.as_ref().map(|h| assignment_json(&inst, h)),
        "details": details,
        "report": report,
    });
    let text = serde_json::to_string_pretty(&out).expect("serialisable");
    crate::report::emit(&text);
    if let Some(p) = &args.out {
        std::fs::write(p, format!("{text}\n")).map_err(|e| VcspError::Input(format!("{}: {e}", p.display())))?;
    }
    Ok(if feasible { 0 } else { 2 })
}
