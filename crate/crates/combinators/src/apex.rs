//! Adding at most `a` apex vertices with arbitrary incident edges.
//!
//! With apex vertices `u₁,…,u_b` (`b ≤ a`), the rest `G − B` is labelled by
//! the base scheme (`μ⁻`, `κ⁻`) and
//!
//! * `μ(v) = ⟨σ(v), c(v), μ⁻(v)⟩`, where `σ(v)` is the index `i` of
//!   `v = u_i` written in `⌈log(b+1)⌉` bits (all zeros off the apex set),
//!   `c(v)` holds the bits `[v u_i ∈ E(G)]` for `i = 1..b`, and
//!   `μ⁻(u_i) = ε`;
//! * `μ(K) = ⟨c(K), μ⁻(K − B)⟩` with `c(K)` the bits `[u_i ∈ K]` and
//!   `μ⁻(∅) = ε`;
//! * `κ(K,u) = 0·κ⁻(K − B, u)` for `u ∉ B` and `1·σ(u)` for `u ∈ B`.

use wmls_core::codes::{frame, push_fixed, unframe_exact, BitLabel};
use wmls_core::mls::{Budget, Instance, LabelError, MixedLabelling, Scheme, TesterError};

use crate::config::{loglog, width_of, CombinatorConfig};
use crate::witness::ApexWitness;

/// The apex combinator for apex sets of size at most `a`.
#[derive(Debug, Clone)]
pub struct Apex<S> {
    pub base: S,
    pub a: usize,
    pub config: CombinatorConfig,
}

impl<S> Apex<S> {
    pub fn new(base: S, a: usize, config: CombinatorConfig) -> Self {
        Apex { base, a, config }
    }

    pub fn budget_over(&self, n: usize, base: Budget) -> Budget {
        let a = self.a as f64;
        let sigma = width_of(self.a) as f64;
        let extra = self.config.apex_c * loglog(n);
        Budget {
            g1: base.g1 + a + sigma + extra,
            g2: base.g2.max(sigma) + 1.0,
            g3: base.g3 + a + extra,
        }
    }
}

fn is_zero(bits: &[bool]) -> bool {
    bits.iter().all(|&b| !b)
}

fn read_index(sigma: &[bool]) -> Result<usize, TesterError> {
    if sigma.len() > 32 {
        return Err(TesterError::Malformed("apex index too wide"));
    }
    Ok(sigma.iter().fold(0usize, |acc, &b| acc << 1 | b as usize))
}

impl<S: Scheme> Scheme for Apex<S> {
    type Witness = ApexWitness<S::Witness>;

    fn name(&self) -> String {
        format!("apex{}({})", self.a, self.base.name())
    }

    fn label(&self, inst: &Instance<Self::Witness>) -> Result<MixedLabelling, LabelError> {
        let n = inst.n();
        let apex = &inst.witness.apex;
        let b = apex.len();
        if b > self.a {
            return Err(LabelError::Witness(format!(
                "{b} apex vertices exceed the bound {}",
                self.a
            )));
        }
        // index[v] = i for v = u_i (1-based), 0 off the apex set.
        let mut index = vec![0usize; n];
        for (i, &u) in apex.iter().enumerate() {
            if u >= n || index[u] != 0 {
                return Err(LabelError::Witness(format!(
                    "apex vertex {u} is out of range or repeated"
                )));
            }
            index[u] = i + 1;
        }
        let width = width_of(b);
        let sigma = |v: usize| {
            let mut bits = Vec::with_capacity(width);
            push_fixed(&mut bits, index[v] as u64, width);
            bits
        };

        let rest: Vec<usize> = (0..n).filter(|&v| index[v] == 0).collect();
        let mut rest_index = vec![usize::MAX; n];
        for (i, &v) in rest.iter().enumerate() {
            rest_index[v] = i;
        }
        let mut sub_cliques = Vec::new();
        let mut route = Vec::with_capacity(inst.cliques.len());
        for k in &inst.cliques {
            let minus: Vec<usize> = k.iter().filter(|&&v| index[v] == 0).map(|&v| rest_index[v]).collect();
            if minus.is_empty() {
                route.push(None);
            } else {
                route.push(Some(sub_cliques.len()));
                sub_cliques.push(minus);
            }
        }
        let minus = if rest.is_empty() {
            MixedLabelling::default()
        } else {
            let sub = Instance {
                supergraph: inst.supergraph.induced(&rest),
                graph: inst.graph.induced(&rest),
                weights: rest.iter().map(|&v| inst.weights[v]).collect(),
                cliques: sub_cliques,
                witness: inst.witness.rest.clone(),
            };
            self.base
                .label(&sub)
                .map_err(|e| e.context("graph without apices"))?
        };

        let vertex = (0..n)
            .map(|v| {
                let c: Vec<bool> = apex.iter().map(|&u| inst.graph.has_edge(v, u)).collect();
                let empty = BitLabel::new();
                let m = if index[v] == 0 {
                    &minus.vertex[rest_index[v]]
                } else {
                    &empty
                };
                frame(&[sigma(v).as_slice(), c.as_slice(), m.bits()])
            })
            .collect();
        let mut clique = Vec::with_capacity(inst.cliques.len());
        let mut local = Vec::with_capacity(inst.cliques.len());
        for (k, r) in inst.cliques.iter().zip(&route) {
            let c: Vec<bool> = apex.iter().map(|u| k.binary_search(u).is_ok()).collect();
            let empty = BitLabel::new();
            let m = r.map_or(&empty, |c| &minus.clique[c]);
            clique.push(frame(&[c.as_slice(), m.bits()]));
            let mut next_rest = 0;
            let ids = k
                .iter()
                .map(|&u| {
                    let mut bits = Vec::new();
                    if index[u] == 0 {
                        bits.push(false);
                        let c = r.expect("clique with a non-apex member");
                        bits.extend_from_slice(&minus.local[c][next_rest]);
                        next_rest += 1;
                    } else {
                        bits.push(true);
                        bits.extend(sigma(u));
                    }
                    BitLabel::from_bits(bits)
                })
                .collect();
            local.push(ids);
        }
        Ok(MixedLabelling {
            vertex,
            clique,
            local,
        })
    }

    fn adjacent(&self, x: &[bool], y: &[bool]) -> Result<bool, TesterError> {
        let [sx, cx, mx] = unframe_exact::<3>(x)?;
        let [sy, cy, my] = unframe_exact::<3>(y)?;
        let (ix, iy) = (read_index(sx)?, read_index(sy)?);
        let bit = |c: &[bool], i: usize| {
            c.get(i - 1)
                .copied()
                .ok_or(TesterError::Malformed("apex index beyond the adjacency bits"))
        };
        if ix > 0 {
            bit(cy, ix)
        } else if iy > 0 {
            bit(cx, iy)
        } else {
            self.base.adjacent(mx, my)
        }
    }

    fn identity(&self, clique: &[bool], kappa: &[bool], v: &[bool]) -> Result<bool, TesterError> {
        let [_, mk] = unframe_exact::<2>(clique)?;
        let [sv, _, mv] = unframe_exact::<3>(v)?;
        let (&flag, rest) = kappa
            .split_first()
            .ok_or(TesterError::Malformed("empty local identifier"))?;
        if flag {
            Ok(!is_zero(rest) && rest == sv)
        } else if !is_zero(sv) {
            Ok(false)
        } else {
            self.base.identity(mk, rest, mv)
        }
    }

    fn budget(&self, n: usize) -> Budget {
        self.budget_over(n, self.base.budget(n))
    }
}
