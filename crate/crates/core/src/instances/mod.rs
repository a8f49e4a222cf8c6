//! Seeded generators for the benchmark families: vertex cover and
//! independent set on random graphs, and unit-cost set cover.

mod graph;
mod problems;

pub use graph::{er_prob_for_degree, gen_ba_graph, gen_er_graph, Graph, GraphSpec};
pub use problems::{gen_mis, gen_mvc, gen_sc, preset, ProblemSpec, ScSpec, PRESETS};
