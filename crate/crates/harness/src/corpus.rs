//! Instance recipes and the fixed regression corpus.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::envelope::{AnyInstance, Params, Witnessed};
use crate::generate::{
    gen_apex_instance, gen_decomposed, gen_product_instance, gen_union_instance, DecomposedParams, GenError,
    TorsoKind,
};
use crate::schemes::SchemeKind;
use crate::HarnessError;

/// How to generate one instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Recipe {
    Product {
        n: usize,
        k: usize,
        h: usize,
        edge_prob: f64,
    },
    Apex {
        n: usize,
        k: usize,
        h: usize,
        a: usize,
        edge_prob: f64,
    },
    Union {
        m: usize,
        part_n: usize,
        k: usize,
        h: usize,
        a: usize,
        edge_prob: f64,
    },
    Decomposed {
        scheme: SchemeKind,
        n: usize,
        bags: usize,
        k: usize,
        torso: TorsoKind,
        k_adh: usize,
        edge_prob: f64,
    },
}

impl Recipe {
    pub fn scheme(&self) -> SchemeKind {
        match self {
            Recipe::Product { .. } => SchemeKind::Product,
            Recipe::Apex { .. } => SchemeKind::Apex,
            Recipe::Union { .. } => SchemeKind::Union,
            Recipe::Decomposed { scheme, .. } => *scheme,
        }
    }

    /// A recipe for `scheme` at roughly `n` vertices, as used by sweeps.
    pub fn scaled(scheme: SchemeKind, n: usize) -> Recipe {
        let h = ((n as f64).sqrt().round() as usize).max(1);
        match scheme {
            SchemeKind::Product => Recipe::Product {
                n,
                k: 2,
                h,
                edge_prob: 0.3,
            },
            SchemeKind::Apex => Recipe::Apex {
                n,
                k: 2,
                h,
                a: 2,
                edge_prob: 0.3,
            },
            SchemeKind::Union => Recipe::Union {
                m: 8,
                part_n: (n / 8).max(1),
                k: 2,
                h: ((n as f64 / 8.0).sqrt().round() as usize).max(1),
                a: 2,
                edge_prob: 0.3,
            },
            scheme => Recipe::Decomposed {
                scheme,
                n,
                bags: (n / 25).max(1),
                k: 2,
                torso: TorsoKind::Product,
                k_adh: 3,
                edge_prob: 0.3,
            },
        }
    }

    /// Generates the instance for `seed`.
    pub fn build(&self, name: &str, seed: u64) -> Result<Witnessed, GenError> {
        let (params, instance) = match *self {
            Recipe::Product { n, k, h, edge_prob } => (
                Params { k, a: 0, k_adh: 0, seed },
                AnyInstance::Product(gen_product_instance(n, k, h, edge_prob, seed)?),
            ),
            Recipe::Apex { n, k, h, a, edge_prob } => (
                Params { k, a, k_adh: 0, seed },
                AnyInstance::Apex(gen_apex_instance(n, k, h, a, edge_prob, seed)?),
            ),
            Recipe::Union {
                m,
                part_n,
                k,
                h,
                a,
                edge_prob,
            } => (
                Params { k, a, k_adh: 0, seed },
                AnyInstance::Union(gen_union_instance(m, part_n, k, h, a, edge_prob, seed)?),
            ),
            Recipe::Decomposed {
                n,
                bags,
                k,
                torso,
                k_adh,
                edge_prob,
                ..
            } => (
                Params {
                    k,
                    a: torso.apices(),
                    k_adh,
                    seed,
                },
                AnyInstance::Decomposed(gen_decomposed(
                    &DecomposedParams {
                        n,
                        bags,
                        k,
                        torso,
                        k_adh,
                        edge_prob,
                    },
                    seed,
                )?),
            ),
        };
        Ok(Witnessed {
            name: name.to_string(),
            scheme: self.scheme(),
            params,
            instance,
        })
    }
}

/// One corpus member: name, recipe and seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub recipe: Recipe,
    pub seed: u64,
}

const fn product(n: usize, k: usize, h: usize, edge_prob: f64) -> Recipe {
    Recipe::Product { n, k, h, edge_prob }
}

const fn apex(n: usize, k: usize, h: usize, a: usize) -> Recipe {
    Recipe::Apex {
        n,
        k,
        h,
        a,
        edge_prob: 0.3,
    }
}

const fn union(m: usize, part_n: usize, k: usize, h: usize, a: usize) -> Recipe {
    Recipe::Union {
        m,
        part_n,
        k,
        h,
        a,
        edge_prob: 0.3,
    }
}

const fn decomposed(scheme: SchemeKind, n: usize, bags: usize, torso: TorsoKind, k_adh: usize) -> Recipe {
    Recipe::Decomposed {
        scheme,
        n,
        bags,
        k: 2,
        torso,
        k_adh,
        edge_prob: 0.3,
    }
}

const fn entry(name: &'static str, recipe: Recipe, seed: u64) -> CorpusEntry {
    CorpusEntry { name, recipe, seed }
}

use SchemeKind::{Compose, Short, Skinny};
use TorsoKind::{Product as P, ProductApex as PA};

/// The 30 fixed instances: trees, 3-trees, products with 1, 5, 15 and 20
/// rows, apex sets of size 0 and 2, unions of 1 and 8 parts, and
/// decomposed instances for the skinny, short and full compositions.
pub const CORPUS: [CorpusEntry; 30] = [
    entry("01-tree-50", product(50, 1, 1, 0.0), 101),
    entry("02-tree-400", product(400, 1, 1, 0.2), 102),
    entry("03-tree-2000", product(2000, 1, 1, 0.1), 103),
    entry("04-ktree3-50", product(50, 3, 1, 0.0), 104),
    entry("05-ktree3-500", product(500, 3, 1, 0.2), 105),
    entry("06-ktree3-1500", product(1500, 3, 1, 0.1), 106),
    entry("07-product-h1", product(300, 2, 1, 0.3), 107),
    entry("08-product-h5", product(300, 2, 5, 0.3), 108),
    entry("09-product-h15", product(300, 2, 15, 0.3), 7),
    entry("10-product-h20", product(1000, 2, 20, 0.3), 110),
    entry("11-product-h20-large", product(2000, 2, 20, 0.3), 111),
    entry("12-product-h5-sparse", product(120, 1, 5, 0.6), 112),
    entry("13-apex-a0", apex(200, 2, 5, 0), 113),
    entry("14-apex-a2", apex(200, 2, 5, 2), 114),
    entry("15-apex-a2-large", apex(800, 2, 10, 2), 115),
    entry("16-apex-a2-tree", apex(60, 1, 3, 2), 116),
    entry("17-union-m1", union(1, 300, 2, 5, 1), 117),
    entry("18-union-m8", union(8, 50, 2, 4, 2), 118),
    entry("19-union-m8-large", union(8, 150, 2, 6, 2), 119),
    entry("20-union-m8-small", union(8, 10, 1, 2, 0), 120),
    entry("21-skinny-200", decomposed(Skinny, 200, 8, P, 2), 121),
    entry("22-skinny-400-apex", decomposed(Skinny, 400, 16, PA(1), 3), 122),
    entry("23-skinny-600", decomposed(Skinny, 600, 30, P, 3), 123),
    entry("24-short-200", decomposed(Short, 200, 8, P, 2), 124),
    entry("25-short-500-apex", decomposed(Short, 500, 20, PA(2), 3), 125),
    entry("26-short-800", decomposed(Short, 800, 40, P, 2), 126),
    entry("27-compose-300", decomposed(Compose, 300, 12, P, 3), 127),
    entry("28-compose-1000", decomposed(Compose, 1000, 40, P, 3), 3),
    entry("29-compose-600-apex", decomposed(Compose, 600, 24, PA(2), 3), 129),
    entry("30-compose-2000-apex", decomposed(Compose, 2000, 80, PA(1), 3), 130),
];

/// The committed corpus directory of this crate.
pub fn default_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

fn file_name(name: &str) -> String {
    format!("{name}.json")
}

/// Generates every corpus member.
pub fn generate_corpus() -> Result<Vec<Witnessed>, GenError> {
    CORPUS.iter().map(|e| e.recipe.build(e.name, e.seed)).collect()
}

/// Writes the corpus as one JSON file per instance.
pub fn write_corpus(dir: &Path) -> Result<(), HarnessError> {
    fs::create_dir_all(dir)?;
    for w in generate_corpus()? {
        fs::write(dir.join(file_name(&w.name)), w.to_json())?;
    }
    Ok(())
}

/// Loads the corpus in order, returning each instance with its file text.
pub fn load_corpus(dir: &Path) -> Result<Vec<(Witnessed, String)>, HarnessError> {
    CORPUS
        .iter()
        .map(|e| {
            let path = dir.join(file_name(e.name));
            let text = fs::read_to_string(&path)
                .map_err(|err| HarnessError::Input(format!("{}: {err}", path.display())))?;
            Ok((Witnessed::from_json(&text)?, text))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn names_are_unique_and_cover_every_scheme() {
        let names: HashSet<&str> = CORPUS.iter().map(|e| e.name).collect();
        assert_eq!(names.len(), CORPUS.len());
        for s in SchemeKind::ALL {
            assert!(CORPUS.iter().any(|e| e.recipe.scheme() == s), "{s}");
        }
    }

    #[test]
    fn small_recipes_build_valid_instances() {
        for e in CORPUS.iter().filter(|e| e.name.ends_with("-50") || e.name.contains("small")) {
            let w = e.recipe.build(e.name, e.seed).unwrap();
            crate::schemes::validate_witnessed(&w).unwrap();
        }
    }
}
