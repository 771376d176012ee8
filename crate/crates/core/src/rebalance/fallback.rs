//! Fallback for stalled rebalancing: evicts a small vertex set from every
//! overloaded block to reduce its internal imbalance, even if the L1^u
//! imbalance grows.

use std::fmt;
use std::str::FromStr;

use crate::hypergraph::{BlockId, VertexId};
use crate::objective::{self, ImbalanceBound};
use crate::partition::{PartitionState, WEIGHT_TOLERANCE};

/// Weight penalty term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rho {
    /// `1 / |c(v)|_1`
    InverseWeight,
    /// `1`
    One,
}

/// Source-block term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Alpha {
    /// `c(v)_l / sum_{j != l} c(v)_j`
    HeaviestShare,
    /// `c(v) . c(V_i)`
    SourceDot,
}

/// Target-block term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Beta {
    /// `sum_{j != l} c(V_t)_j / c(V_t)_l`
    TargetShare,
    /// `c(v) . (1 - c(V_t))`
    TargetSlack,
    /// `1 + g(v, V_t) / |c(v)|_1` with the L1^u balance gain `g`
    ImbalancePenalty,
}

/// Fallback score `rho(v) * alpha(v) * beta(v, t)`; the default is
/// `r1a1b3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FallbackRating {
    pub rho: Rho,
    pub alpha: Alpha,
    pub beta: Beta,
}

impl Default for FallbackRating {
    fn default() -> Self {
        Self {
            rho: Rho::InverseWeight,
            alpha: Alpha::HeaviestShare,
            beta: Beta::ImbalancePenalty,
        }
    }
}

impl fmt::Display for FallbackRating {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = match self.rho {
            Rho::InverseWeight => 1,
            Rho::One => 2,
        };
        let a = match self.alpha {
            Alpha::HeaviestShare => 1,
            Alpha::SourceDot => 2,
        };
        let b = match self.beta {
            Beta::TargetShare => 1,
            Beta::TargetSlack => 2,
            Beta::ImbalancePenalty => 3,
        };
        write!(f, "r{r}a{a}b{b}")
    }
}

impl FromStr for FallbackRating {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bytes = s.as_bytes();
        let bad = || format!("invalid fallback rating '{s}', expected r<1|2>a<1|2>b<1|2|3>");
        if bytes.len() != 6 || bytes[0] != b'r' || bytes[2] != b'a' || bytes[4] != b'b' {
            return Err(bad());
        }
        let rho = match bytes[1] {
            b'1' => Rho::InverseWeight,
            b'2' => Rho::One,
            _ => return Err(bad()),
        };
        let alpha = match bytes[3] {
            b'1' => Alpha::HeaviestShare,
            b'2' => Alpha::SourceDot,
            _ => return Err(bad()),
        };
        let beta = match bytes[5] {
            b'1' => Beta::TargetShare,
            b'2' => Beta::TargetSlack,
            b'3' => Beta::ImbalancePenalty,
            _ => return Err(bad()),
        };
        Ok(Self { rho, alpha, beta })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FallbackSelection {
    pub vertex: VertexId,
    pub target: BlockId,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockPlan {
    pub block: BlockId,
    /// Dimension in which the block is heaviest.
    pub heaviest_dim: usize,
    /// Selected vertices in descending score order.
    pub selected: Vec<FallbackSelection>,
    /// Whether removing the selection brings the block within `1 + eps`.
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FallbackPlan {
    pub blocks: Vec<BlockPlan>,
}

impl FallbackPlan {
    pub fn moves(&self) -> usize {
        self.blocks.iter().map(|b| b.selected.len()).sum()
    }

    pub fn is_feasible(&self) -> bool {
        self.blocks.iter().all(|b| b.feasible)
    }
}

fn safe_product(factors: [f64; 3]) -> f64 {
    let p = factors[0] * factors[1] * factors[2];
    if p.is_nan() {
        0.0
    } else {
        p
    }
}

/// Heaviest dimension of `block` and the score and target of each of its
/// vertices, best first. Zero-weight and `excluded` vertices are skipped.
pub fn score_block(
    state: &PartitionState<'_>,
    block: BlockId,
    bound: &ImbalanceBound,
    rating: FallbackRating,
    excluded: &[bool],
) -> (usize, Vec<FallbackSelection>) {
    let d = state.dims();
    let k = state.k();
    let row = state.block_weight(block).to_vec();
    let heaviest_dim = (0..d).fold(0, |best, j| if row[j] > row[best] { j } else { best });
    let l = heaviest_dim;

    let mut scored = Vec::new();
    for v in state.block_members(block) {
        if excluded.get(v).copied().unwrap_or(false) {
            continue;
        }
        let c = state.vertex_weight_in(v, block);
        let norm: f64 = c.iter().sum();
        if norm <= 0.0 {
            continue;
        }
        let rho = match rating.rho {
            Rho::InverseWeight => 1.0 / norm,
            Rho::One => 1.0,
        };
        let alpha = match rating.alpha {
            Alpha::HeaviestShare => {
                let rest = norm - c[l];
                if rest <= 0.0 {
                    f64::INFINITY
                } else {
                    c[l] / rest
                }
            }
            Alpha::SourceDot => c.iter().zip(&row).map(|(a, b)| a * b).sum(),
        };

        let (target, score) = match rating.beta {
            Beta::ImbalancePenalty => {
                // least-worsening target first, then score it
                let mut best: Option<(BlockId, f64)> = None;
                for t in (0..k).filter(|&t| t != block) {
                    let g = objective::balance_gain(state, v, t, bound);
                    if best.map_or(true, |(_, bg)| g > bg) {
                        best = Some((t, g));
                    }
                }
                let Some((t, g)) = best else { continue };
                let beta = 1.0 + g / norm;
                let score = if alpha.is_infinite() {
                    f64::INFINITY
                } else {
                    safe_product([rho, alpha, beta])
                };
                (t, score)
            }
            Beta::TargetShare | Beta::TargetSlack => {
                let mut best: Option<(BlockId, f64)> = None;
                for t in (0..k).filter(|&t| t != block) {
                    let trow = state.block_weight(t);
                    let beta = if rating.beta == Beta::TargetShare {
                        let rest: f64 = (0..d).filter(|&j| j != l).map(|j| trow[j]).sum();
                        if trow[l] <= 0.0 {
                            f64::INFINITY
                        } else {
                            rest / trow[l]
                        }
                    } else {
                        (0..d)
                            .map(|j| state.rel_weight(v, t, j) * (1.0 - trow[j]))
                            .sum()
                    };
                    let score = if alpha.is_infinite() && beta > 0.0 {
                        f64::INFINITY
                    } else {
                        safe_product([rho, alpha, beta])
                    };
                    if best.map_or(true, |(_, bs)| score > bs) {
                        best = Some((t, score));
                    }
                }
                let Some(best) = best else { continue };
                best
            }
        };
        scored.push(FallbackSelection {
            vertex: v,
            target,
            score,
        });
    }
    scored.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.vertex.cmp(&b.vertex)));
    (heaviest_dim, scored)
}

/// Selects the eviction set of `block` without moving anything: vertices in
/// score order until the rest of the block fits within `1 + eps`.
pub fn plan_block(
    state: &PartitionState<'_>,
    block: BlockId,
    bound: &ImbalanceBound,
    rating: FallbackRating,
    excluded: &[bool],
) -> BlockPlan {
    let (heaviest_dim, scored) = score_block(state, block, bound, rating, excluded);
    let row = state.block_weight(block).to_vec();
    let limit = 1.0 + bound.epsilon() + WEIGHT_TOLERANCE;
    let mut remaining = row;
    let mut selected = Vec::new();
    for s in scored {
        if remaining.iter().all(|&w| w <= limit) {
            break;
        }
        for (j, r) in remaining.iter_mut().enumerate() {
            *r -= state.rel_weight(s.vertex, block, j);
        }
        selected.push(s);
    }
    BlockPlan {
        block,
        heaviest_dim,
        feasible: remaining.iter().all(|&w| w <= limit),
        selected,
    }
}

/// Plans and applies the fallback for every block above `1 + eps`, worst
/// L1^u block first. Vertices moved by an earlier block are not reconsidered.
pub fn fallback(
    state: &mut PartitionState<'_>,
    bound: &ImbalanceBound,
    rating: FallbackRating,
) -> FallbackPlan {
    let epsilon = bound.epsilon();
    let mut order: Vec<(BlockId, f64)> = (0..state.k())
        .filter(|&b| state.is_block_overloaded(b, epsilon))
        .map(|b| (b, objective::l1u_block(state.block_weight(b), bound.upper())))
        .collect();
    order.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));

    let mut moved = vec![false; state.hypergraph().num_vertices()];
    let mut plan = FallbackPlan::default();
    for (block, _) in order {
        if !state.is_block_overloaded(block, epsilon) {
            continue;
        }
        let block_plan = plan_block(state, block, bound, rating, &moved);
        for s in &block_plan.selected {
            state.move_vertex(s.vertex, s.target);
            moved[s.vertex] = true;
        }
        plan.blocks.push(block_plan);
    }
    plan
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::tests::r1;
    use crate::hypergraph::Hypergraph;
    use crate::partition::NormalizationContext;

    #[test]
    fn rating_selector_round_trips() {
        for s in ["r1a1b1", "r1a1b2", "r1a1b3", "r1a2b1", "r2a2b3", "r2a1b2"] {
            assert_eq!(s.parse::<FallbackRating>().unwrap().to_string(), s);
        }
        assert_eq!(FallbackRating::default().to_string(), "r1a1b3");
        assert!("r3a1b1".parse::<FallbackRating>().is_err());
        assert!("r1a1".parse::<FallbackRating>().is_err());
    }

    #[test]
    fn r1_fallback_selects_v1() {
        let h = r1();
        let ctx = NormalizationContext::new(&h, 2).unwrap();
        // state after the first greedy round: V1 = {v1, v3}, V2 = {v2, v4}
        let mut p = PartitionState::new(&h, ctx, vec![0, 1, 0, 1]).unwrap();
        let bound = ImbalanceBound::with_override(vec![1.1, 1.1], 0.2).unwrap();
        let plan = plan_block(&p, 0, &bound, FallbackRating::default(), &[]);
        assert_eq!(plan.heaviest_dim, 0);
        assert_eq!(plan.selected.len(), 1);
        assert_eq!(plan.selected[0].vertex, 0);
        assert_eq!(plan.selected[0].target, 1);
        assert!((plan.selected[0].score - 5.0 / 3.0).abs() < 1e-9);
        assert!(plan.feasible);

        let applied = fallback(&mut p, &bound, FallbackRating::default());
        assert_eq!(applied.blocks.len(), 1);
        assert_eq!(p.assignment(), &[1, 1, 0, 1]);
        assert!((objective::l1u_total(&p, &bound) - 0.8).abs() < 1e-9);
    }

    #[test]
    fn r1_scores_of_both_candidates() {
        let h = r1();
        let ctx = NormalizationContext::new(&h, 2).unwrap();
        let p = PartitionState::new(&h, ctx, vec![0, 1, 0, 1]).unwrap();
        let bound = ImbalanceBound::with_override(vec![1.1, 1.1], 0.2).unwrap();
        let (l, scored) = score_block(&p, 0, &bound, FallbackRating::default(), &[]);
        assert_eq!(l, 0);
        let scores: Vec<_> = scored.iter().map(|s| (s.vertex, s.score)).collect();
        assert_eq!(scores.len(), 2);
        assert_eq!(scores[0].0, 0);
        assert!((scores[0].1 - 1.6666666666666667).abs() < 1e-9);
        assert_eq!(scores[1].0, 2);
        assert!((scores[1].1 - 0.8).abs() < 1e-9);
        assert!((objective::balance_gain(&p, 0, 1, &bound) + 0.4).abs() < 1e-9);
        assert!((objective::balance_gain(&p, 2, 1, &bound) + 0.2).abs() < 1e-9);
    }

    #[test]
    fn pure_overload_vertex_scores_infinite() {
        let h = Hypergraph::new(
            &[],
            &[vec![0.6, 0.0], vec![0.5, 0.5], vec![0.9, 0.1], vec![0.0, 1.4]],
            &[],
        )
        .unwrap();
        let ctx = NormalizationContext::new(&h, 2).unwrap();
        let p = PartitionState::new(&h, ctx, vec![0, 0, 0, 1]).unwrap();
        let bound = ImbalanceBound::plain(2, 0.05).unwrap();
        let plan = plan_block(&p, 0, &bound, FallbackRating::default(), &[]);
        assert_eq!(plan.selected[0].vertex, 0);
        assert!(plan.selected[0].score.is_infinite());
    }

    #[test]
    fn alternative_ratings_produce_feasible_plans() {
        let h = r1();
        let ctx = NormalizationContext::new(&h, 2).unwrap();
        let p = PartitionState::new(&h, ctx, vec![0, 1, 0, 1]).unwrap();
        let bound = ImbalanceBound::with_override(vec![1.1, 1.1], 0.2).unwrap();
        for s in ["r1a1b1", "r1a1b2", "r1a2b1", "r1a2b2", "r1a2b3", "r2a1b1", "r2a1b3", "r2a2b2"] {
            let plan = plan_block(&p, 0, &bound, s.parse().unwrap(), &[]);
            assert!(plan.feasible, "{s}");
            assert!(!plan.selected.is_empty(), "{s}");
        }
    }
}
