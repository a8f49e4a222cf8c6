use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::graph::{er_prob_for_degree, Graph, GraphSpec};
use crate::error::{Error, Result};
use crate::ilp::IlpInstance;

/// Minimum vertex cover: `min Σ x_v` s.t. `−x_u − x_v <= −1` per edge.
pub fn gen_mvc(g: &Graph) -> IlpInstance {
    let n = g.n_nodes().max(1);
    let trip: Vec<(usize, usize, f64)> = g
        .edges()
        .iter()
        .enumerate()
        .flat_map(|(r, &(u, v))| [(r, u, -1.0), (r, v, -1.0)])
        .collect();
    IlpInstance::new("mvc", n, g.edges().len(), vec![1.0; n], &trip, vec![-1.0; g.edges().len()])
        .expect("graph edges index valid nodes")
        .with_metadata("problem", "mvc")
        .with_metadata("nodes", g.n_nodes().to_string())
        .with_metadata("edges", g.edges().len().to_string())
}

/// Maximum independent set: `min −Σ x_v` s.t. `x_u + x_v <= 1` per edge.
pub fn gen_mis(g: &Graph) -> IlpInstance {
    let n = g.n_nodes().max(1);
    let trip: Vec<(usize, usize, f64)> = g
        .edges()
        .iter()
        .enumerate()
        .flat_map(|(r, &(u, v))| [(r, u, 1.0), (r, v, 1.0)])
        .collect();
    IlpInstance::new("mis", n, g.edges().len(), vec![-1.0; n], &trip, vec![1.0; g.edges().len()])
        .expect("graph edges index valid nodes")
        .with_metadata("problem", "mis")
        .with_metadata("nodes", g.n_nodes().to_string())
        .with_metadata("edges", g.edges().len().to_string())
}

/// Set-cover generator parameters: every one of `n_rows` elements is covered
/// by `round(density·n_vars)` sets drawn uniformly without replacement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScSpec {
    pub n_vars: usize,
    pub n_rows: usize,
    pub density: f64,
}

impl ScSpec {
    pub fn per_row(&self) -> usize {
        (self.density * self.n_vars as f64).round() as usize
    }
}

/// Unit-cost set cover: `min Σ x_i` s.t. `−Σ_{i covers j} x_i <= −1`.
pub fn gen_sc<R: Rng + ?Sized>(spec: &ScSpec, rng: &mut R) -> Result<IlpInstance> {
    if !(spec.density > 0.0 && spec.density <= 1.0) {
        return Err(Error::ConfigInvalid(format!(
            "density must lie in (0, 1], got {}",
            spec.density
        )));
    }
    let k = spec.per_row();
    if k < 1 || spec.n_vars == 0 {
        return Err(Error::DensityTooLow {
            density: spec.density,
            n_vars: spec.n_vars,
        });
    }
    let mut trip = Vec::with_capacity(k * spec.n_rows);
    for r in 0..spec.n_rows {
        let mut cols = rand::seq::index::sample(rng, spec.n_vars, k).into_vec();
        cols.sort_unstable();
        trip.extend(cols.into_iter().map(|c| (r, c, -1.0)));
    }
    Ok(IlpInstance::new(
        "sc",
        spec.n_vars,
        spec.n_rows,
        vec![1.0; spec.n_vars],
        &trip,
        vec![-1.0; spec.n_rows],
    )?
    .with_metadata("problem", "sc")
    .with_metadata("density", spec.density.to_string()))
}

/// A generator recipe: problem family plus its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "problem", rename_all = "lowercase")]
pub enum ProblemSpec {
    Mvc { graph: GraphSpec },
    Mis { graph: GraphSpec },
    Sc(ScSpec),
}

impl ProblemSpec {
    /// Instance for `seed`; a pure function of `(self, seed)`.
    pub fn generate(&self, seed: u64) -> Result<IlpInstance> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut inst, label) = match self {
            ProblemSpec::Mvc { graph } => (gen_mvc(&graph.generate(&mut rng)?), graph.label()),
            ProblemSpec::Mis { graph } => (gen_mis(&graph.generate(&mut rng)?), graph.label()),
            ProblemSpec::Sc(sc) => (
                gen_sc(sc, &mut rng)?,
                format!("{}x{}d{}", sc.n_vars, sc.n_rows, sc.density),
            ),
        };
        let name = format!("{}-{label}-s{seed}", self.family());
        inst.set_name(name);
        inst.metadata_mut().insert("seed".into(), seed.to_string());
        inst.metadata_mut().insert("generator".into(), label);
        Ok(inst)
    }

    pub fn family(&self) -> &'static str {
        match self {
            ProblemSpec::Mvc { .. } => "mvc",
            ProblemSpec::Mis { .. } => "mis",
            ProblemSpec::Sc(_) => "sc",
        }
    }
}

/// Named benchmark recipes, including the shifted-distribution variants.
pub const PRESETS: &[&str] = &[
    "mvc1000",
    "mvc2000",
    "mis1500",
    "mis3000",
    "sc2000",
    "sc4000",
    "mvc1000-ood",
    "mvc2000-ood",
    "mis1500-ood",
    "mis3000-ood",
    "sc2000-ood",
    "sc4000-ood",
];

/// Attachment used for BA graphs in the independent-set OOD presets.
const MIS_OOD_AFFINITY: usize = 4;

pub fn preset(name: &str) -> Result<ProblemSpec> {
    let ba = |n_nodes, affinity| GraphSpec::Ba { n_nodes, affinity };
    let er = |n_nodes| GraphSpec::Er {
        n_nodes,
        edge_prob: er_prob_for_degree(5.0, n_nodes),
    };
    let sc = |n_vars, density| {
        ProblemSpec::Sc(ScSpec {
            n_vars,
            n_rows: 5000,
            density,
        })
    };
    Ok(match name {
        "mvc1000" => ProblemSpec::Mvc { graph: ba(1000, 70) },
        "mvc2000" => ProblemSpec::Mvc { graph: ba(2000, 70) },
        "mis1500" => ProblemSpec::Mis { graph: er(1500) },
        "mis3000" => ProblemSpec::Mis { graph: er(3000) },
        "sc2000" => sc(2000, 0.05),
        "sc4000" => sc(4000, 0.05),
        "mvc1000-ood" => ProblemSpec::Mvc { graph: ba(1000, 5) },
        "mvc2000-ood" => ProblemSpec::Mvc { graph: ba(2000, 5) },
        "mis1500-ood" => ProblemSpec::Mis {
            graph: ba(1500, MIS_OOD_AFFINITY),
        },
        "mis3000-ood" => ProblemSpec::Mis {
            graph: ba(3000, MIS_OOD_AFFINITY),
        },
        "sc2000-ood" => sc(2000, 0.5),
        "sc4000-ood" => sc(4000, 0.5),
        other => {
            return Err(Error::ConfigInvalid(format!(
                "unknown preset {other:?}; known: {}",
                PRESETS.join(", ")
            )))
        }
    })
}
