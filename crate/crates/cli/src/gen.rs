use vcsp::fixtures::{self, sig_fu};
use vcsp::io::instance_to_json;
use vcsp::value::int;
use vcsp::{Instance, Result, VcspError};

use crate::{GenArgs, RightArg, Template};

fn need(ok: bool, msg: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(VcspError::Input(msg.into()))
    }
}

pub fn generate(args: &GenArgs) -> Result<Instance> {
    let one = int(1);
    let grid = || -> Result<()> { need(args.rows >= 1 && args.cols >= 1, "--rows and --cols must be positive") };
    let unit = Some(&one);
    let sig = [("f", 2), ("u", 1)];
    let right = || match args.right {
        RightArg::Vc => fixtures::vc_structure(),
        RightArg::Is => fixtures::is_structure(),
    };
    match args.template {
        Template::VcGrid => {
            grid()?;
            Instance::new(fixtures::grid_left(args.rows, args.cols, unit), fixtures::vc_structure())
        }
        Template::IsGrid => {
            grid()?;
            Instance::new(fixtures::grid_left(args.rows, args.cols, unit), fixtures::is_structure())
        }
        Template::ApexGrid => {
            grid()?;
            Instance::new(fixtures::apex_grid_left(args.rows, args.cols, unit), fixtures::vc_structure())
        }
        Template::Path => {
            need(args.n >= 1, "--n must be positive")?;
            Instance::new(fixtures::path_left(args.n, &one, unit), right())
        }
        Template::Cycle => {
            need(args.n >= 3, "--n must be at least 3")?;
            Instance::new(fixtures::cycle_left(args.n, &one, unit), right())
        }
        Template::Clique | Template::Coloring => {
            need(args.n >= 1, "--n must be positive")?;
            let i = args.i.unwrap_or(args.n);
            need(i >= 1, "--i must be positive")?;
            Instance::new(fixtures::clique_left(args.n), fixtures::coloring_structure(i))
        }
        Template::LoopClique => {
            need(args.n >= 1, "--n must be positive")?;
            Instance::new(fixtures::loop_clique(args.n), fixtures::coloring_structure(args.i.unwrap_or(2)))
        }
        Template::CliqueReduction => {
            need(args.n >= 1, "--n must be positive")?;
            need((0.0..=1.0).contains(&args.p), "--p must lie in [0, 1]")?;
            let g = fixtures::random_graph(args.n, args.p, args.seed);
            Instance::new(fixtures::clique_left(args.n + 1), fixtures::max_clique_reduction(&g))
        }
        Template::RandomMinsol | Template::RandomMaxsol => {
            need(args.n >= 1 && args.q >= 1, "--n and --q must be positive")?;
            need((0.0..=1.0).contains(&args.p), "--p must lie in [0, 1]")?;
            let a = fixtures::random_left(args.n, args.p, args.seed, &sig);
            debug_assert_eq!(a.signature(), &sig_fu());
            let c = if args.template == Template::RandomMinsol {
                fixtures::random_min_sol(args.q, &sig, args.seed)
            } else {
                fixtures::random_max_sol(args.q, &sig, args.seed)
            };
            Instance::new(a, c)
        }
    }
}

pub fn run(args: &GenArgs) -> Result<u8> {
    let inst = generate(args)?;
    let text = instance_to_json(&inst);
    match &args.out {
        Some(p) => std::fs::write(p, format!("{text}\n")).map_err(|e| VcspError::Input(format!("{}: {e}", p.display())))?,
        None => crate::report::emit(&text),
    }
    Ok(0)
}
