//! JSON instance files.
//!
//! ```json
//! {"signature":[{"name":"f","arity":2}],
//!  "left":{"domain":["v1","v2"],
//!          "tuples":[{"sym":"f","args":["v1","v2"],"value":"1"}],
//!          "default":"0"},
//!  "right":{"domain":["0","1"],
//!           "tables":[{"sym":"f","default":"0",
//!                      "entries":[{"args":["0","0"],"value":"inf"}]}]}}
//! ```
//!
//! Values are strings (`"p/q"`, `"p"`, `"inf"`, `"-inf"`); unknown keys are rejected.

use serde::{Deserialize, Serialize};

use crate::error::{Result, VcspError};
use crate::instance::Instance;
use crate::structure::{Signature, ValuedStructure};
use crate::value::ExtRat;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolSpec {
    pub name: String,
    pub arity: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TupleSpec {
    pub sym: String,
    pub args: Vec<String>,
    pub value: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LeftSpec {
    pub domain: Vec<String>,
    #[serde(default)]
    pub tuples: Vec<TupleSpec>,
    #[serde(default = "zero_string")]
    pub default: String,
}

fn zero_string() -> String {
    "0".into()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntrySpec {
    pub args: Vec<String>,
    pub value: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableSpec {
    pub sym: String,
    pub default: String,
    #[serde(default)]
    pub entries: Vec<EntrySpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RightSpec {
    pub domain: Vec<String>,
    pub tables: Vec<TableSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub signature: Vec<SymbolSpec>,
    pub left: LeftSpec,
    pub right: RightSpec,
}

fn parse_value(s: &str, what: &str) -> Result<ExtRat> {
    ExtRat::parse(s).map_err(|_| VcspError::Input(format!("{what}: malformed value {s:?}")))
}

fn resolve(st: &ValuedStructure, args: &[String], what: &str) -> Result<Vec<usize>> {
    args.iter()
        .map(|a| {
            st.element(a)
                .ok_or_else(|| VcspError::Input(format!("{what}: unknown element {a:?}")))
        })
        .collect()
}

impl InstanceFile {
    pub fn to_instance(&self) -> Result<Instance> {
        let signature = Signature::new(
            self.signature
                .iter()
                .map(|s| (s.name.clone(), s.arity))
                .collect(),
        )?;
        let sym = |name: &str, what: &str| {
            signature
                .index_of(name)
                .ok_or_else(|| VcspError::Input(format!("{what}: unknown symbol {name:?}")))
        };

        let left_default = parse_value(&self.left.default, "left default")?;
        let mut left = ValuedStructure::new(signature.clone(), self.left.domain.clone(), left_default)?;
        for t in &self.left.tuples {
            let what = format!("left tuple {}({})", t.sym, t.args.join(","));
            let s = sym(&t.sym, &what)?;
            let args = resolve(&left, &t.args, &what)?;
            let v = parse_value(&t.value, &what)?;
            left.set(s, args, v)
                .map_err(|e| VcspError::Input(format!("{what}: {e}")))?;
        }

        let mut right = ValuedStructure::new(signature.clone(), self.right.domain.clone(), ExtRat::zero())?;
        let mut seen = vec![false; signature.len()];
        for t in &self.right.tables {
            let s = sym(&t.sym, "right table")?;
            if std::mem::replace(&mut seen[s], true) {
                return Err(VcspError::Input(format!("duplicate right table for {}", t.sym)));
            }
            right.set_default(s, parse_value(&t.default, &format!("right table {} default", t.sym))?);
            for e in &t.entries {
                let what = format!("right entry {}({})", t.sym, e.args.join(","));
                let args = resolve(&right, &e.args, &what)?;
                let v = parse_value(&e.value, &what)?;
                right
                    .set(s, args, v)
                    .map_err(|e| VcspError::Input(format!("{what}: {e}")))?;
            }
        }
        if let Some(missing) = seen.iter().position(|&b| !b) {
            return Err(VcspError::Input(format!(
                "right structure has no table for symbol {}",
                signature.symbols()[missing].name
            )));
        }
        Instance::new(left, right)
    }

    pub fn from_instance(inst: &Instance) -> Self {
        let sig = inst.left.signature();
        let signature = sig
            .symbols()
            .iter()
            .map(|s| SymbolSpec {
                name: s.name.clone(),
                arity: s.arity,
            })
            .collect();
        let ids = |st: &ValuedStructure, args: &[usize]| -> Vec<String> {
            args.iter().map(|&a| st.domain()[a].clone()).collect()
        };

        let l = &inst.left;
        let mut tuples = Vec::new();
        let mut left_default = ExtRat::zero();
        for (s, t) in l.tables().iter().enumerate() {
            if !t.default.is_zero() {
                left_default = t.default.clone();
            }
            for (args, v) in &t.entries {
                tuples.push(TupleSpec {
                    sym: sig.symbols()[s].name.clone(),
                    args: ids(l, args),
                    value: v.to_string(),
                });
            }
        }
        // a single left default is representable only when all symbols agree
        let uniform = l.tables().iter().all(|t| t.default == left_default);
        if !uniform {
            left_default = ExtRat::zero();
            tuples.clear();
            for s in 0..sig.len() {
                for args in l.all_tuples(s) {
                    let v = l.get(s, &args);
                    if !v.is_zero() {
                        tuples.push(TupleSpec {
                            sym: sig.symbols()[s].name.clone(),
                            args: ids(l, &args),
                            value: v.to_string(),
                        });
                    }
                }
            }
        }

        let r = &inst.right;
        let tables = r
            .tables()
            .iter()
            .enumerate()
            .map(|(s, t)| TableSpec {
                sym: sig.symbols()[s].name.clone(),
                default: t.default.to_string(),
                entries: t
                    .entries
                    .iter()
                    .map(|(args, v)| EntrySpec {
                        args: ids(r, args),
                        value: v.to_string(),
                    })
                    .collect(),
            })
            .collect();

        InstanceFile {
            signature,
            left: LeftSpec {
                domain: l.domain().to_vec(),
                tuples,
                default: left_default.to_string(),
            },
            right: RightSpec {
                domain: r.domain().to_vec(),
                tables,
            },
        }
    }
}

pub fn parse_instance(json: &str) -> Result<Instance> {
    let file: InstanceFile =
        serde_json::from_str(json).map_err(|e| VcspError::Input(format!("instance JSON: {e}")))?;
    file.to_instance()
}

pub fn instance_to_json(inst: &Instance) -> String {
    serde_json::to_string_pretty(&InstanceFile::from_instance(inst)).expect("serialisable")
}

pub fn read_instance(path: &std::path::Path) -> Result<Instance> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| VcspError::Input(format!("{}: {e}", path.display())))?;
    parse_instance(&text)
}
