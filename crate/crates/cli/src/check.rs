use serde_json::{json, Map, Value};
use vcsp::classify::{classify_max_sol, classify_min_sol};
use vcsp::diagonal::{dismantle_to_diagonal, hom_path};
use vcsp::duality::{certify_dopt, lp_search, separate_with, OvercastDistribution, OvercastSearch, DEFAULT_MAP_BUDGET};
use vcsp::exact::DEFAULT_NAIVE_BUDGET;
use vcsp::io::{read_instance, InstanceFile};
use vcsp::structure::Side;
use vcsp::value::parse_rational;
use vcsp::{Instance, Result, ValuedStructure, VcspError};

use crate::CheckArgs;

fn pair_id(c: &ValuedStructure, p: usize) -> String {
    let n = c.size();
    format!("({},{})", c.domain()[p / n], c.domain()[p % n])
}

fn classify(c: &ValuedStructure) -> Result<Value> {
    let mut out = Map::new();
    if c.validate(Side::RightMin).is_ok() {
        let order = classify_min_sol(c)?;
        out.insert(
            "min_sol".into(),
            json!(order.map(|o| o.iter().map(|&x| c.domain()[x].clone()).collect::<Vec<_>>())),
        );
        match dismantle_to_diagonal(c, false)? {
            Some(seq) => {
                let path = hom_path(c)?;
                out.insert("diagonalisable".into(), json!(true));
                out.insert("path_len".into(), json!(path.maps.len()));
                out.insert("m".into(), json!(path.m.to_string()));
                out.insert("idempotent".into(), json!(path.idempotent));
                let steps: Vec<Value> = seq
                    .steps
                    .iter()
                    .map(|w| json!({"removed": pair_id(c, w.dominated), "by": pair_id(c, w.dominator), "m": w.m.to_string()}))
                    .collect();
                out.insert("dismantling".into(), json!(steps));
            }
            None => {
                out.insert("diagonalisable".into(), json!(false));
            }
        }
    }
    if c.validate(Side::RightMax).is_ok() {
        out.insert(
            "max_sol_bottom".into(),
            json!(classify_max_sol(c).map(|b| c.domain()[b].clone())),
        );
    }
    Ok(Value::Object(out))
}

fn omega_json(a: &ValuedStructure, b: &ValuedStructure, w: &OvercastDistribution) -> Value {
    match w {
        OvercastDistribution::UniformTotal { .. } => json!({"uniform_total_maps": true}),
        OvercastDistribution::Explicit(list) => json!(list
            .iter()
            .map(|(g, p)| {
                let map: Map<String, Value> = g
                    .map()
                    .iter()
                    .enumerate()
                    .map(|(x, y)| (a.domain()[x].clone(), json!(y.map(|y| b.domain()[y].clone()))))
                    .collect();
                json!({"map": map, "p": p.to_string()})
            })
            .collect::<Vec<_>>()),
    }
}

pub fn run(args: &CheckArgs) -> Result<u8> {
    let mut out = Map::new();
    let budget = args.budget.unwrap_or(DEFAULT_MAP_BUDGET);
    if let Some(p) = &args.instance {
        let inst = read_instance(p)?;
        if let Value::Object(m) = classify(&inst.right)? {
            out.extend(m);
        }
    }
    if let Some(paths) = &args.overcast {
        let a = read_instance(&paths[0])?.left;
        let b = read_instance(&paths[1])?.left;
        match lp_search(&a, &b, budget).map(|r| r.0) {
            Ok(OvercastSearch::Found(w)) => {
                out.insert("overcast".into(), json!(true));
                out.insert("omega".into(), omega_json(&a, &b, &w));
            }
            Ok(OvercastSearch::Separated(_)) => {
                let sep = separate_with(&a, &b, budget, DEFAULT_NAIVE_BUDGET)?;
                let file = InstanceFile::from_instance(&Instance {
                    left: b.clone(),
                    right: sep.structure.clone(),
                });
                out.insert("overcast".into(), json!(false));
                out.insert("separator".into(), serde_json::to_value(&file.right).expect("serialisable"));
                out.insert("left_value".into(), json!(sep.left_value.to_string()));
                out.insert("right_value".into(), json!(sep.right_value.to_string()));
            }
            Err(e) => return Err(e),
        }
    }
    if let Some(paths) = &args.dopt {
        let a = read_instance(&paths[0])?.left;
        let b = read_instance(&paths[1])?.left;
        let eps = parse_rational(&args.epsilon)?;
        out.insert("epsilon".into(), json!(eps.to_string()));
        out.insert("dopt_certified".into(), json!(certify_dopt(&a, &b, &eps)?));
    }
    if out.is_empty() {
        return Err(VcspError::Input("check needs --instance, --overcast or --dopt".into()));
    }
    crate::report::emit(&serde_json::to_string(&Value::Object(out)).expect("serialisable"));
    Ok(0)
}
