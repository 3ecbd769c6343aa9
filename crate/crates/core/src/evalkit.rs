//! Evaluation: token-overlap NER metrics, entity-level negation metrics,
//! and document-level k-fold cross-validation.
//!
//! NER scoring is at single-word granularity: a token counts positive for a
//! class iff its tag is one of I, B, E, S. Totals micro-average over the
//! four semantic-group channels; the negation channel is scored separately,
//! at entity level, where an entity counts as predicted-negated iff any of
//! its tokens carries a non-O tag in the negation channel.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Entity, Tag, TagGrid, NEGATION_CHANNEL};
use crate::error::{Error, Result};

/// Raw confusion counts plus derived precision/recall/F1.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ClassMetrics {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
}

impl ClassMetrics {
    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn f1(&self) -> f64 {
        let (p, r) = (self.precision(), self.recall());
        if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        }
    }

    pub fn add(&mut self, other: &ClassMetrics) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.fn_ += other.fn_;
    }
}

/// 0/0 is defined as 0.
fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Metrics for one evaluation run (one fold, or a whole corpus).
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    /// Per semantic group, in channel order (4 entries for NER; 1 entry,
    /// the negation class, for entity-level negation reports).
    pub per_class: Vec<(String, ClassMetrics)>,
    /// Micro-average over the classes above.
    pub total: ClassMetrics,
    pub fold: Option<usize>,
}

impl EvalReport {
    fn from_classes(per_class: Vec<(String, ClassMetrics)>) -> EvalReport {
        let mut total = ClassMetrics::default();
        for (_, m) in &per_class {
            total.add(m);
        }
        EvalReport {
            per_class,
            total,
            fold: None,
        }
    }
}

fn positive(tag: Tag) -> bool {
    tag != Tag::Outside
}

/// Token-overlap metrics over aligned grid sets. Only the four semantic
/// group channels are scored; the negation channel is excluded here.
pub fn token_overlap_metrics(gold: &[TagGrid], pred: &[TagGrid]) -> Result<EvalReport> {
    if gold.len() != pred.len() {
        return Err(Error::LengthMismatch {
            context: "gold vs predicted sentence counts".to_string(),
            expected: gold.len(),
            got: pred.len(),
        });
    }
    let mut per_class: Vec<(String, ClassMetrics)> = (0..4)
        .map(|c| (crate::corpus::channel_name(c).to_string(), ClassMetrics::default()))
        .collect();
    for (g, p) in gold.iter().zip(pred) {
        if g.n_tokens() != p.n_tokens() {
            return Err(Error::LengthMismatch {
                context: "gold vs predicted sentence length".to_string(),
                expected: g.n_tokens(),
                got: p.n_tokens(),
            });
        }
        for t in 0..g.n_tokens() {
            for (c, (_, m)) in per_class.iter_mut().enumerate() {
                match (positive(g.get(t, c)), positive(p.get(t, c))) {
                    (true, true) => m.tp += 1,
                    (false, true) => m.fp += 1,
                    (true, false) => m.fn_ += 1,
                    (false, false) => {}
                }
            }
        }
    }
    Ok(EvalReport::from_classes(per_class))
}

/// A gold entity with its negation flag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldEntity {
    pub entity: Entity,
    pub negated: bool,
}

/// Derives per-entity negation flags from a grid's negation channel: an
/// entity is flagged iff any of its tokens carries I, B, E or S there.
pub fn negation_flags_from_grid(entities: &[Entity], grid: &TagGrid) -> Vec<bool> {
    entities
        .iter()
        .map(|e| {
            e.tokens
                .iter()
                .any(|&t| t < grid.n_tokens() && positive(grid.get(t, NEGATION_CHANNEL)))
        })
        .collect()
}

/// Entity-level binary negation metrics over gold entities.
///
/// `predictions` pairs an entity (channel + token set) with a negated flag;
/// entities are matched by exact channel and token-set equality. Predictions
/// for unknown entities count as false positives, and their count is
/// reported back for warning.
pub fn negation_entity_metrics(
    gold: &[GoldEntity],
    predictions: &[(Entity, bool)],
) -> (EvalReport, usize) {
    let mut m = ClassMetrics::default();
    let mut unknown = 0usize;
    for (entity, negated) in predictions {
        match gold.iter().find(|g| g.entity == *entity) {
            Some(g) => match (g.negated, *negated) {
                (true, true) => m.tp += 1,
                (false, true) => m.fp += 1,
                // Misses are counted from the gold side below.
                _ => {}
            },
            None => {
                if *negated {
                    unknown += 1;
                    m.fp += 1;
                }
            }
        }
    }
    for g in gold.iter().filter(|g| g.negated) {
        let hit = predictions
            .iter()
            .any(|(e, negated)| *negated && e == &g.entity);
        if !hit {
            m.fn_ += 1;
        }
    }
    (
        EvalReport::from_classes(alloc::vec![("Negation".to_string(), m)]),
        unknown,
    )
}

/// Document-level fold assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    folds: Vec<Vec<String>>,
    pub seed: u64,
}

impl FoldPlan {
    /// Shuffles document ids with the seeded RNG and deals them round-robin,
    /// so fold sizes differ by at most one and every document appears in
    /// exactly one fold.
    pub fn new(doc_ids: &[String], k: usize, seed: u64) -> Result<FoldPlan> {
        if k < 2 {
            return Err(Error::InvalidConfig("fold count must be >= 2".to_string()));
        }
        if doc_ids.len() < k {
            return Err(Error::EmptyInput(alloc::format!(
                "need at least {k} documents for {k} folds, got {}",
                doc_ids.len()
            )));
        }
        let mut ids: Vec<String> = doc_ids.to_vec();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ids.shuffle(&mut rng);
        let mut folds = alloc::vec![Vec::new(); k];
        for (idx, id) in ids.into_iter().enumerate() {
            folds[idx % k].push(id);
        }
        Ok(FoldPlan { folds, seed })
    }

    pub fn k(&self) -> usize {
        self.folds.len()
    }

    /// Test documents of one fold.
    pub fn test_ids(&self, fold: usize) -> &[String] {
        &self.folds[fold]
    }

    /// Training documents of one fold (all other folds).
    pub fn train_ids(&self, fold: usize) -> Vec<&str> {
        self.folds
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != fold)
            .flat_map(|(_, ids)| ids.iter().map(String::as_str))
            .collect()
    }
}

/// Cross-validation outcome: per-fold reports plus two aggregates.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossValReport {
    pub folds: Vec<EvalReport>,
    /// Unweighted mean of per-fold precision/recall/F1.
    pub mean_precision: f64,
    pub mean_recall: f64,
    pub mean_f1: f64,
    /// Counts pooled over all folds (micro aggregate).
    pub pooled: ClassMetrics,
}

/// Runs `run_fold(fold_index, train_ids, test_ids)` for every fold and
/// aggregates. Fold order is fixed (0..k) so the merge is deterministic.
pub fn cross_validate<F>(plan: &FoldPlan, mut run_fold: F) -> Result<CrossValReport>
where
    F: FnMut(usize, &[&str], &[String]) -> Result<EvalReport>,
{
    let mut folds = Vec::with_capacity(plan.k());
    for fold in 0..plan.k() {
        let train = plan.train_ids(fold);
        let mut report = run_fold(fold, &train, plan.test_ids(fold))?;
        report.fold = Some(fold);
        folds.push(report);
    }
    let k = folds.len() as f64;
    let mut pooled = ClassMetrics::default();
    let (mut p_sum, mut r_sum, mut f_sum) = (0.0, 0.0, 0.0);
    for report in &folds {
        pooled.add(&report.total);
        p_sum += report.total.precision();
        r_sum += report.total.recall();
        f_sum += report.total.f1();
    }
    Ok(CrossValReport {
        folds,
        mean_precision: p_sum / k,
        mean_recall: r_sum / k,
        mean_f1: f_sum / k,
        pooled,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{iobes_to_entities, Tag, TagGrid};

    fn grid(rows: &[[Tag; 5]]) -> TagGrid {
        let mut g = TagGrid::new(rows.len());
        for (t, row) in rows.iter().enumerate() {
            for (c, &tag) in row.iter().enumerate() {
                g.set(t, c, tag);
            }
        }
        g
    }

    const O: Tag = Tag::Outside;
    const B: Tag = Tag::Begin;
    const E: Tag = Tag::End;
    const S: Tag = Tag::Single;

    #[test]
    fn perfect_prediction_scores_one() {
        let g = grid(&[[B, O, O, O, O], [E, S, O, O, O]]);
        let report = token_overlap_metrics(&[g.clone()], &[g]).unwrap();
        for (_, m) in &report.per_class {
            if m.tp > 0 {
                assert_eq!(m.precision(), 1.0);
                assert_eq!(m.recall(), 1.0);
                assert_eq!(m.f1(), 1.0);
            }
        }
        assert_eq!(report.total.f1(), 1.0);
    }

    #[test]
    fn all_outside_prediction_scores_zero_by_convention() {
        let gold = grid(&[[S, O, O, O, O]]);
        let pred = grid(&[[O, O, O, O, O]]);
        let report = token_overlap_metrics(&[gold], &[pred]).unwrap();
        assert_eq!(report.total.precision(), 0.0);
        assert_eq!(report.total.recall(), 0.0);
        assert_eq!(report.total.f1(), 0.0);
    }

    #[test]
    fn partial_overlap_hand_count() {
        // Gold [B,O,E], pred [S,O,O] in channel 0: TP=1, FP=0, FN=1.
        let gold = grid(&[[B, O, O, O, O], [O, O, O, O, O], [E, O, O, O, O]]);
        let pred = grid(&[[S, O, O, O, O], [O, O, O, O, O], [O, O, O, O, O]]);
        let report = token_overlap_metrics(&[gold], &[pred]).unwrap();
        let m = &report.per_class[0].1;
        assert_eq!((m.tp, m.fp, m.fn_), (1, 0, 1));
        assert_eq!(m.precision(), 1.0);
        assert_eq!(m.recall(), 0.5);
        assert!((m.f1() - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn negation_channel_excluded_from_ner_totals() {
        let gold = grid(&[[O, O, O, O, S]]);
        let pred = grid(&[[O, O, O, O, O]]);
        let report = token_overlap_metrics(&[gold], &[pred]).unwrap();
        assert_eq!(report.total, ClassMetrics::default());
    }

    #[test]
    fn micro_total_is_sum_of_class_counts() {
        let gold = grid(&[[S, S, O, O, O], [O, O, S, O, O]]);
        let pred = grid(&[[S, O, S, O, O], [O, O, S, O, O]]);
        let report = token_overlap_metrics(&[gold], &[pred]).unwrap();
        let sum_tp: u64 = report.per_class.iter().map(|(_, m)| m.tp).sum();
        assert_eq!(report.total.tp, sum_tp);
    }

    #[test]
    fn misaligned_grids_are_an_error() {
        let g1 = grid(&[[O, O, O, O, O]]);
        let g2 = grid(&[[O, O, O, O, O], [O, O, O, O, O]]);
        assert!(token_overlap_metrics(&[g1.clone()], &[g2]).is_err());
        assert!(token_overlap_metrics(&[g1], &[]).is_err());
    }

    #[test]
    fn swap_symmetry_precision_equals_recall() {
        let gold = grid(&[[B, O, O, O, O], [E, O, O, O, O], [O, S, O, O, O]]);
        let pred = grid(&[[S, O, O, O, O], [O, O, O, O, O], [O, S, O, O, O]]);
        let ab = token_overlap_metrics(&[gold.clone()], &[pred.clone()]).unwrap();
        let ba = token_overlap_metrics(&[pred], &[gold]).unwrap();
        assert_eq!(ab.total.precision(), ba.total.recall());
        assert_eq!(ab.total.recall(), ba.total.precision());
    }

    fn entity(channel: usize, tokens: &[usize]) -> Entity {
        Entity {
            channel,
            tokens: tokens.to_vec(),
        }
    }

    #[test]
    fn negation_metrics_all_correct() {
        let gold = [
            GoldEntity {
                entity: entity(1, &[0, 1]),
                negated: true,
            },
            GoldEntity {
                entity: entity(1, &[3]),
                negated: false,
            },
        ];
        let preds = alloc::vec![(entity(1, &[0, 1]), true), (entity(1, &[3]), false)];
        let (report, unknown) = negation_entity_metrics(&gold, &preds);
        assert_eq!(unknown, 0);
        assert_eq!(report.total.f1(), 1.0);
    }

    #[test]
    fn negation_metrics_all_affirmed_scores_zero() {
        let gold: Vec<GoldEntity> = (0..10)
            .map(|i| GoldEntity {
                entity: entity(1, &[i]),
                negated: i < 4,
            })
            .collect();
        let preds: Vec<(Entity, bool)> =
            (0..10).map(|i| (entity(1, &[i]), false)).collect();
        let (report, _) = negation_entity_metrics(&gold, &preds);
        assert_eq!(report.total.precision(), 0.0);
        assert_eq!(report.total.recall(), 0.0);
        assert_eq!(report.total.f1(), 0.0);
    }

    #[test]
    fn negation_metrics_hand_count() {
        // 3 negated gold; predictions negate 2 correctly plus 1 wrong.
        let gold = [
            GoldEntity { entity: entity(1, &[0]), negated: true },
            GoldEntity { entity: entity(1, &[1]), negated: true },
            GoldEntity { entity: entity(1, &[2]), negated: true },
            GoldEntity { entity: entity(1, &[3]), negated: false },
        ];
        let preds = alloc::vec![
            (entity(1, &[0]), true),
            (entity(1, &[1]), true),
            (entity(1, &[3]), true),
        ];
        let (report, _) = negation_entity_metrics(&gold, &preds);
        let m = report.total;
        assert_eq!((m.tp, m.fp, m.fn_), (2, 1, 1));
        assert!((m.f1() - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn unknown_predicted_entity_counts_fp() {
        let gold = [GoldEntity {
            entity: entity(1, &[0]),
            negated: true,
        }];
        let preds = alloc::vec![(entity(1, &[0]), true), (entity(2, &[5]), true)];
        let (report, unknown) = negation_entity_metrics(&gold, &preds);
        assert_eq!(unknown, 1);
        assert_eq!(report.total.fp, 1);
    }

    #[test]
    fn flags_from_grid_follow_any_overlap_rule() {
        let mut g = TagGrid::new(4);
        g.set(0, 1, Tag::Begin);
        g.set(2, 1, Tag::End);
        g.set(2, NEGATION_CHANNEL, Tag::Single);
        let decoded = iobes_to_entities(&g);
        let class_entities: Vec<Entity> = decoded
            .entities
            .iter()
            .filter(|e| e.channel == 1)
            .cloned()
            .collect();
        let flags = negation_flags_from_grid(&class_entities, &g);
        assert_eq!(flags, alloc::vec![true]);
    }

    #[test]
    fn fold_plan_partitions_evenly() {
        let ids: Vec<String> = (0..10).map(|i| alloc::format!("doc{i}")).collect();
        let plan = FoldPlan::new(&ids, 5, 17).unwrap();
        assert_eq!(plan.k(), 5);
        let mut seen: Vec<&String> = Vec::new();
        for fold in 0..5 {
            assert_eq!(plan.test_ids(fold).len(), 2);
            seen.extend(plan.test_ids(fold));
            assert_eq!(plan.train_ids(fold).len(), 8);
        }
        let mut sorted: Vec<&str> = seen.iter().map(|s| s.as_str()).collect();
        sorted.sort_unstable();
        let mut expect: Vec<&str> = ids.iter().map(|s| s.as_str()).collect();
        expect.sort_unstable();
        assert_eq!(sorted, expect);
    }

    #[test]
    fn fold_plan_is_seed_deterministic() {
        let ids: Vec<String> = (0..11).map(|i| alloc::format!("doc{i}")).collect();
        assert_eq!(
            FoldPlan::new(&ids, 5, 3).unwrap(),
            FoldPlan::new(&ids, 5, 3).unwrap()
        );
        assert_ne!(
            FoldPlan::new(&ids, 5, 3).unwrap(),
            FoldPlan::new(&ids, 5, 4).unwrap()
        );
        // Uneven splits differ by at most one.
        let plan = FoldPlan::new(&ids, 5, 3).unwrap();
        let sizes: Vec<usize> = (0..5).map(|f| plan.test_ids(f).len()).collect();
        assert!(sizes.iter().all(|&s| s == 2 || s == 3));
    }

    #[test]
    fn too_few_documents_is_an_error() {
        let ids: Vec<String> = (0..3).map(|i| alloc::format!("doc{i}")).collect();
        assert!(FoldPlan::new(&ids, 5, 0).is_err());
        assert!(FoldPlan::new(&ids, 1, 0).is_err());
    }

    #[test]
    fn cross_validation_mean_is_arithmetic_mean() {
        let ids: Vec<String> = (0..10).map(|i| alloc::format!("doc{i}")).collect();
        let plan = FoldPlan::new(&ids, 5, 1).unwrap();
        let report = cross_validate(&plan, |fold, train, test| {
            assert_eq!(train.len() + test.len(), 10);
            // Synthetic counts varying by fold.
            let m = ClassMetrics {
                tp: (fold + 1) as u64,
                fp: 1,
                fn_: 1,
            };
            Ok(EvalReport::from_classes(alloc::vec![(
                "BodyLocation".to_string(),
                m
            )]))
        })
        .unwrap();
        let expect: f64 = report.folds.iter().map(|f| f.total.f1()).sum::<f64>() / 5.0;
        assert!((report.mean_f1 - expect).abs() < 1e-12);
        assert_eq!(report.folds.len(), 5);
        for (i, fold) in report.folds.iter().enumerate() {
            assert_eq!(fold.fold, Some(i));
        }
        assert_eq!(report.pooled.tp, 1 + 2 + 3 + 4 + 5);
    }
}
