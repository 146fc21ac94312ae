//! The JSON envelope of witnessed instances.
//!
//! ```json
//! { "format": "wmls-instance", "version": 1, "name": "...", "scheme": "compose",
//!   "params": { "k": 2, "a": 1, "k_adh": 3, "seed": 3 },
//!   "n": 1000, "edges": [[0, 5], ...], "supergraph_edges": [...],
//!   "weights": [...], "cliques": [[...], ...],
//!   "witness": { "type": "decomposition", "decomposition": {...}, "torsos": [...] } }
//! ```
//!
//! Witnesses nest: a decomposition carries one witness per torso, a union
//! one per part, an apex witness the witness of the graph without apices.

use serde::{Deserialize, Serialize};
use wmls_combinators::{ApexWitness, DecompWitness, UnionWitness};
use wmls_core::graph_model::{DecompositionJson, Graph};
use wmls_core::mls::Instance;
use wmls_product::{ProductWitness, ProductWitnessJson};

use crate::generate::{ApexW, DecompW, UnionW};
use crate::schemes::SchemeKind;
use crate::HarnessError;

pub const FORMAT: &str = "wmls-instance";
pub const VERSION: u32 = 1;

/// Scheme parameters of an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Params {
    /// Treewidth bound of the product hosts.
    pub k: usize,
    /// Bound on the number of apex vertices.
    pub a: usize,
    /// Bound on the adhesion-width of the decomposition.
    pub k_adh: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum WitnessJson {
    Product(ProductWitnessJson),
    Apex {
        apex: Vec<usize>,
        rest: Box<WitnessJson>,
    },
    Union {
        n: usize,
        parts: Vec<PartJson>,
    },
    Decomposition {
        decomposition: DecompositionJson,
        torsos: Vec<WitnessJson>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartJson {
    pub vertices: Vec<usize>,
    pub witness: WitnessJson,
}

impl WitnessJson {
    pub fn kind(&self) -> &'static str {
        match self {
            WitnessJson::Product(_) => "product",
            WitnessJson::Apex { .. } => "apex",
            WitnessJson::Union { .. } => "union",
            WitnessJson::Decomposition { .. } => "decomposition",
        }
    }

    fn mismatch(&self, expected: &'static str) -> HarnessError {
        HarnessError::WitnessKind {
            expected,
            found: self.kind().to_string(),
        }
    }

    fn product(self) -> Result<ProductWitness, HarnessError> {
        match self {
            WitnessJson::Product(p) => {
                ProductWitness::from_json(p).map_err(|e| HarnessError::Format(e.to_string()))
            }
            other => Err(other.mismatch("product")),
        }
    }

    fn apex(self) -> Result<ApexW, HarnessError> {
        match self {
            WitnessJson::Apex { apex, rest } => Ok(ApexWitness {
                apex,
                rest: rest.product()?,
            }),
            other => Err(other.mismatch("apex")),
        }
    }

    fn union(self) -> Result<UnionW, HarnessError> {
        match self {
            WitnessJson::Union { n, parts } => Ok(UnionWitness {
                n,
                parts: parts
                    .into_iter()
                    .map(|p| Ok((p.vertices, p.witness.apex()?)))
                    .collect::<Result<_, HarnessError>>()?,
            }),
            other => Err(other.mismatch("union")),
        }
    }

    fn decomposition(self, n: usize) -> Result<DecompW, HarnessError> {
        match self {
            WitnessJson::Decomposition {
                decomposition,
                torsos,
            } => Ok(DecompWitness {
                n,
                decomposition: decomposition
                    .into_decomposition()
                    .map_err(|e| HarnessError::Format(e.to_string()))?,
                torsos: torsos
                    .into_iter()
                    .map(WitnessJson::union)
                    .collect::<Result<_, _>>()?,
            }),
            other => Err(other.mismatch("decomposition")),
        }
    }
}

fn product_json(w: &ProductWitness) -> WitnessJson {
    WitnessJson::Product(w.to_json())
}

fn apex_json(w: &ApexW) -> WitnessJson {
    WitnessJson::Apex {
        apex: w.apex.clone(),
        rest: Box::new(product_json(&w.rest)),
    }
}

fn union_json(w: &UnionW) -> WitnessJson {
    WitnessJson::Union {
        n: w.n,
        parts: w
            .parts
            .iter()
            .map(|(vertices, w)| PartJson {
                vertices: vertices.clone(),
                witness: apex_json(w),
            })
            .collect(),
    }
}

fn decomposition_json(w: &DecompW) -> WitnessJson {
    WitnessJson::Decomposition {
        decomposition: w.decomposition.to_json(),
        torsos: w.torsos.iter().map(union_json).collect(),
    }
}

/// A typed instance of one of the witness kinds.
#[derive(Debug, Clone)]
pub enum AnyInstance {
    Product(Instance<ProductWitness>),
    Apex(Instance<ApexW>),
    Union(Instance<UnionW>),
    Decomposed(Instance<DecompW>),
}

macro_rules! each_instance {
    ($any:expr, $i:ident => $body:expr) => {
        match $any {
            AnyInstance::Product($i) => $body,
            AnyInstance::Apex($i) => $body,
            AnyInstance::Union($i) => $body,
            AnyInstance::Decomposed($i) => $body,
        }
    };
}

impl AnyInstance {
    pub fn n(&self) -> usize {
        each_instance!(self, i => i.n())
    }

    pub fn graph(&self) -> &Graph {
        each_instance!(self, i => &i.graph)
    }

    pub fn supergraph(&self) -> &Graph {
        each_instance!(self, i => &i.supergraph)
    }

    pub fn weights(&self) -> &[u64] {
        each_instance!(self, i => &i.weights)
    }

    pub fn cliques(&self) -> &[Vec<usize>] {
        each_instance!(self, i => &i.cliques)
    }

    pub fn set_unit_weights(&mut self) {
        each_instance!(self, i => i.weights.iter_mut().for_each(|w| *w = 1))
    }

    pub fn witness_kind(&self) -> &'static str {
        match self {
            AnyInstance::Product(_) => "product",
            AnyInstance::Apex(_) => "apex",
            AnyInstance::Union(_) => "union",
            AnyInstance::Decomposed(_) => "decomposition",
        }
    }

    fn witness_json(&self) -> WitnessJson {
        match self {
            AnyInstance::Product(i) => product_json(&i.witness),
            AnyInstance::Apex(i) => apex_json(&i.witness),
            AnyInstance::Union(i) => union_json(&i.witness),
            AnyInstance::Decomposed(i) => decomposition_json(&i.witness),
        }
    }
}

/// An instance together with the scheme that should label it.
#[derive(Debug, Clone)]
pub struct Witnessed {
    pub name: String,
    pub scheme: SchemeKind,
    pub params: Params,
    pub instance: AnyInstance,
}

/// The serialised form of [`Witnessed`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub format: String,
    pub version: u32,
    pub name: String,
    pub scheme: SchemeKind,
    pub params: Params,
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    pub supergraph_edges: Vec<[usize; 2]>,
    pub weights: Vec<u64>,
    pub cliques: Vec<Vec<usize>>,
    pub witness: WitnessJson,
}

fn pairs(g: &Graph) -> Vec<[usize; 2]> {
    g.edges().iter().map(|&(u, v)| [u, v]).collect()
}

impl Witnessed {
    pub fn to_file(&self) -> InstanceFile {
        let i = &self.instance;
        InstanceFile {
            format: FORMAT.into(),
            version: VERSION,
            name: self.name.clone(),
            scheme: self.scheme,
            params: self.params,
            n: i.n(),
            edges: pairs(i.graph()),
            supergraph_edges: pairs(i.supergraph()),
            weights: i.weights().to_vec(),
            cliques: i.cliques().to_vec(),
            witness: i.witness_json(),
        }
    }

    /// Compact JSON with a trailing newline; byte-identical for identical
    /// instances.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(&self.to_file()).expect("instances serialise");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Witnessed, HarnessError> {
        let file: InstanceFile =
            serde_json::from_str(text).map_err(|e| HarnessError::Format(e.to_string()))?;
        Witnessed::from_file(file)
    }

    pub fn from_file(f: InstanceFile) -> Result<Witnessed, HarnessError> {
        if f.format != FORMAT || f.version != VERSION {
            return Err(HarnessError::Format(format!(
                "expected {FORMAT} version {VERSION}, found {} version {}",
                f.format, f.version
            )));
        }
        let graph = |edges: &[[usize; 2]]| {
            Graph::new(f.n, edges.iter().map(|e| (e[0], e[1])).collect())
                .map_err(|e| HarnessError::Format(e.to_string()))
        };
        let graph_g = graph(&f.edges)?;
        let supergraph = graph(&f.supergraph_edges)?;
        macro_rules! build {
            ($witness:expr) => {
                Instance {
                    supergraph,
                    graph: graph_g,
                    weights: f.weights,
                    cliques: f.cliques,
                    witness: $witness,
                }
            };
        }
        let instance = match f.scheme {
            SchemeKind::Product => AnyInstance::Product(build!(f.witness.product()?)),
            SchemeKind::Apex => AnyInstance::Apex(build!(f.witness.apex()?)),
            SchemeKind::Union => AnyInstance::Union(build!(f.witness.union()?)),
            SchemeKind::Skinny | SchemeKind::Short | SchemeKind::Compose => {
                AnyInstance::Decomposed(build!(f.witness.decomposition(f.n)?))
            }
        };
        let w = Witnessed {
            name: f.name,
            scheme: f.scheme,
            params: f.params,
            instance,
        };
        each_instance!(&w.instance, i => i.validate().map_err(|e| HarnessError::Format(e.to_string()))?);
        Ok(w)
    }
}
