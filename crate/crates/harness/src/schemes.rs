//! The scheme stack and dispatch from instance kinds to typed schemes.
//!
//! | id        | scheme                                   | witness              |
//! |-----------|------------------------------------------|----------------------|
//! | `product` | product                                  | product              |
//! | `apex`    | apex(product)                            | apex                 |
//! | `union`   | union(apex(product))                     | union                |
//! | `skinny`  | skinny(union(apex(product)))             | decomposition        |
//! | `short`   | short(union(apex(product)))              | decomposition        |
//! | `compose` | compose(union(apex(product)))            | decomposition        |

use std::fmt;

use serde::{Deserialize, Serialize};
use wmls_combinators::{Apex, ApexWitness, CombinatorConfig, Composed, DecompWitness, Short, Skinny, Union, UnionWitness};
use wmls_core::graph_model::{torso, Decomposition};
use wmls_core::mls::{Instance, Scheme};
use wmls_product::{ProductBudget, ProductScheme};

use crate::envelope::{AnyInstance, Witnessed};
use crate::generate::{ApexW, DecompW, UnionW};
use crate::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    Product,
    Apex,
    Union,
    Skinny,
    Short,
    Compose,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 6] = [
        SchemeKind::Product,
        SchemeKind::Apex,
        SchemeKind::Union,
        SchemeKind::Skinny,
        SchemeKind::Short,
        SchemeKind::Compose,
    ];

    pub fn id(self) -> &'static str {
        match self {
            SchemeKind::Product => "product",
            SchemeKind::Apex => "apex",
            SchemeKind::Union => "union",
            SchemeKind::Skinny => "skinny",
            SchemeKind::Short => "short",
            SchemeKind::Compose => "compose",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// All budget constants, as read from `--budget-config`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct BudgetConfig {
    pub product: ProductBudget,
    pub combinators: CombinatorConfig,
}

pub type ApexScheme = Apex<ProductScheme>;
pub type UnionScheme = Union<ApexScheme>;
pub type ComposeScheme = Composed<UnionScheme>;

fn union_scheme(p: &crate::envelope::Params, cfg: &BudgetConfig) -> UnionScheme {
    let product = ProductScheme {
        k: p.k,
        constants: cfg.product,
    };
    Union::new(Apex::new(product, p.a, cfg.combinators), cfg.combinators)
}

/// The full composition for an instance's parameters.
pub fn compose_scheme(p: &crate::envelope::Params, cfg: &BudgetConfig) -> ComposeScheme {
    Composed::new(union_scheme(p, cfg), p.k_adh, cfg.combinators)
}

/// Work that runs against whichever typed scheme an instance calls for.
pub trait SchemeTask {
    type Output;
    fn run<S: Scheme>(self, scheme: &S, inst: &Instance<S::Witness>) -> Self::Output;
}

/// Builds the scheme for `w.scheme` and runs `task` on it.
pub fn dispatch<T: SchemeTask>(w: &Witnessed, cfg: &BudgetConfig, task: T) -> Result<T::Output, HarnessError> {
    let p = &w.params;
    let c = cfg.combinators;
    let union = union_scheme(p, cfg);
    Ok(match (w.scheme, &w.instance) {
        (SchemeKind::Product, AnyInstance::Product(i)) => task.run(&union.base.base, i),
        (SchemeKind::Apex, AnyInstance::Apex(i)) => task.run(&union.base, i),
        (SchemeKind::Union, AnyInstance::Union(i)) => task.run(&union, i),
        (SchemeKind::Skinny, AnyInstance::Decomposed(i)) => task.run(&Skinny::new(union, p.k_adh, None, c), i),
        (SchemeKind::Short, AnyInstance::Decomposed(i)) => task.run(&Short::new(union, p.k_adh, None, c), i),
        (SchemeKind::Compose, AnyInstance::Decomposed(i)) => task.run(&compose_scheme(p, cfg), i),
        (scheme, i) => {
            return Err(HarnessError::WitnessKind {
                expected: match scheme {
                    SchemeKind::Product => "product",
                    SchemeKind::Apex => "apex",
                    SchemeKind::Union => "union",
                    _ => "decomposition",
                },
                found: i.witness_kind().to_string(),
            })
        }
    })
}

fn single_bag<W>(inst: &Instance<W>, torso: UnionW) -> Instance<DecompW> {
    let n = inst.graph.n();
    Instance {
        supergraph: inst.supergraph.clone(),
        graph: inst.graph.clone(),
        weights: inst.weights.clone(),
        cliques: inst.cliques.clone(),
        witness: DecompWitness {
            n,
            decomposition: if n == 0 {
                Decomposition::empty()
            } else {
                Decomposition::single((0..n).collect())
            },
            torsos: if n == 0 { Vec::new() } else { vec![torso] },
        },
    }
}

/// The same instance as an input of the full composition: a product, apex
/// or union instance becomes a one-bag decomposition whose torso is the
/// whole supergraph.
pub fn lift_to_compose(w: &Witnessed) -> Witnessed {
    let instance = match &w.instance {
        AnyInstance::Product(i) => single_bag(
            i,
            UnionWitness::single(
                i.n(),
                ApexWitness {
                    apex: Vec::new(),
                    rest: i.witness.clone(),
                },
            ),
        ),
        AnyInstance::Apex(i) => single_bag(i, UnionWitness::single(i.n(), i.witness.clone())),
        AnyInstance::Union(i) => single_bag(i, i.witness.clone()),
        AnyInstance::Decomposed(i) => i.clone(),
    };
    Witnessed {
        name: w.name.clone(),
        scheme: SchemeKind::Compose,
        params: w.params,
        instance: AnyInstance::Decomposed(instance),
    }
}

fn validate_apex(w: &ApexW, supergraph: &wmls_core::graph_model::Graph) -> Result<(), String> {
    let n = supergraph.n();
    let mut is_apex = vec![false; n];
    for &u in &w.apex {
        if u >= n || std::mem::replace(&mut is_apex[u], true) {
            return Err(format!("apex vertex {u} is out of range or repeated"));
        }
    }
    let rest: Vec<usize> = (0..n).filter(|&v| !is_apex[v]).collect();
    w.rest.validate(Some(&supergraph.induced(&rest)))
}

fn validate_union(w: &UnionW, supergraph: &wmls_core::graph_model::Graph) -> Result<(), String> {
    w.validate(supergraph).map_err(|e| e.to_string())?;
    for (vertices, part) in &w.parts {
        validate_apex(part, &supergraph.induced(vertices))?;
    }
    Ok(())
}

/// Checks the instance and its witness certificate, recursively: every
/// product placement respects the strong product, every union partition
/// separates the supergraph, every decomposition is valid and every torso
/// is certified by its witness.
pub fn validate_witnessed(w: &Witnessed) -> Result<(), String> {
    match &w.instance {
        AnyInstance::Product(i) => {
            i.validate().map_err(|e| e.to_string())?;
            i.witness.validate(Some(&i.supergraph))
        }
        AnyInstance::Apex(i) => {
            i.validate().map_err(|e| e.to_string())?;
            validate_apex(&i.witness, &i.supergraph)
        }
        AnyInstance::Union(i) => {
            i.validate().map_err(|e| e.to_string())?;
            validate_union(&i.witness, &i.supergraph)
        }
        AnyInstance::Decomposed(i) => {
            i.validate().map_err(|e| e.to_string())?;
            let dw: &DecompWitness<UnionW> = &i.witness;
            dw.validate(&i.supergraph).map_err(|e| e.to_string())?;
            if dw.decomposition.adhesion_width() > w.params.k_adh {
                return Err(format!(
                    "adhesion-width {} exceeds k_adh = {}",
                    dw.decomposition.adhesion_width(),
                    w.params.k_adh
                ));
            }
            for x in 0..dw.decomposition.node_count() {
                let t = torso(&i.supergraph, &dw.decomposition, x).map_err(|e| e.to_string())?;
                validate_union(&dw.torsos[x], &t.graph).map_err(|e| format!("torso {x}: {e}"))?;
            }
            Ok(())
        }
    }
}
