//! Minimisation approximation schemes: the layered planar algorithm and the
//! recursive scheme driven by deletion/layering strategies.

pub mod blend;
pub mod game;
pub mod layering;
pub mod planar;

pub use blend::{blend_counters, BlendStats};
pub use game::{
    apex_then, baker_minimise, baker_minimise_with, bounded_tw_base, interval_bound, planar_bfs, play_game,
    Action, BakerOptions, BakerOutcome, BakerStrategy, GameState,
};
pub use layering::{bfs_layering, plan_blocks, BlockPlan, Layering, Membership};
pub use planar::{min_ptas_planar, min_ptas_planar_with, PtasOptions, PtasOutcome};
