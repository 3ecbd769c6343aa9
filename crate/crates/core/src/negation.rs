//! Negation detection: trigger/window classification plus a hybrid that
//! filters it through dependency relations.
//!
//! The window classifier scans for lexicon trigger phrases over normalized
//! tokens (longest phrase wins at a position; pseudo-triggers consume their
//! span and negate nothing). A pre-negation trigger negates entities
//! starting within the 6 tokens after it; a post-negation trigger negates
//! entities ending within the 6 tokens before it. The window counts tokens,
//! punctuation included.
//!
//! The hybrid keeps only `neg` and `conj:or` edges of a dependency graph and
//! classifies an entity as negated iff
//!
//! 1. one of its tokens participates in a `neg` edge, or participates in a
//!    `conj:or` edge with a word that participates in a `neg` edge; or
//! 2. the window classifier negated it, it is the closest entity to the
//!    trigger (ties negate all tied entities), and the sentence's filtered
//!    graph has no `neg` edge at all.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::corpus::Sentence;
use crate::error::{Error, Result};

/// Tokens within this distance of a trigger are in its window.
pub const NEGATION_WINDOW: usize = 6;

/// Role of a trigger phrase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriggerRole {
    /// Negates entities after it ("no", "no sign of").
    Pre,
    /// Negates entities before it ("is ruled out").
    Post,
    /// Looks like a trigger but never negates ("no increase").
    Pseudo,
}

impl TriggerRole {
    pub fn name(self) -> &'static str {
        match self {
            TriggerRole::Pre => "pre",
            TriggerRole::Post => "post",
            TriggerRole::Pseudo => "pseudo",
        }
    }

    pub fn parse(s: &str) -> Option<TriggerRole> {
        match s {
            "pre" => Some(TriggerRole::Pre),
            "post" => Some(TriggerRole::Post),
            "pseudo" => Some(TriggerRole::Pseudo),
            _ => None,
        }
    }
}

/// Trigger phrases with their roles; phrases are normalized token sequences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriggerLexicon {
    triggers: Vec<(Vec<String>, TriggerRole)>,
}

impl TriggerLexicon {
    /// Builds from `(phrase, role)` pairs; phrases are split on whitespace.
    /// Empty phrases are rejected.
    pub fn new<I, S>(entries: I) -> Result<TriggerLexicon>
    where
        I: IntoIterator<Item = (S, TriggerRole)>,
        S: AsRef<str>,
    {
        let mut triggers = Vec::new();
        for (phrase, role) in entries {
            let tokens: Vec<String> = phrase
                .as_ref()
                .split_whitespace()
                .map(str::to_string)
                .collect();
            if tokens.is_empty() {
                return Err(Error::EmptyInput("trigger phrase".to_string()));
            }
            triggers.push((tokens, role));
        }
        if triggers.is_empty() {
            return Err(Error::EmptyInput("trigger lexicon".to_string()));
        }
        Ok(TriggerLexicon { triggers })
    }

    pub fn len(&self) -> usize {
        self.triggers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triggers.is_empty()
    }

    /// Longest trigger matching `tokens[pos..]`, if any.
    fn match_at(&self, tokens: &[&str], pos: usize) -> Option<(usize, TriggerRole)> {
        let mut best: Option<(usize, TriggerRole)> = None;
        for (phrase, role) in &self.triggers {
            let len = phrase.len();
            if pos + len <= tokens.len()
                && phrase.iter().zip(&tokens[pos..pos + len]).all(|(a, b)| a == b)
                && best.map_or(true, |(blen, _)| len > blen)
            {
                best = Some((len, *role));
            }
        }
        best
    }
}

/// A trigger occurrence in a sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TriggerHit {
    /// Index of the trigger's first token.
    pub position: usize,
    /// Trigger length in tokens.
    pub len: usize,
    pub role: TriggerRole,
}

/// Finds non-overlapping triggers left to right, longest match first.
pub fn find_triggers(sentence: &Sentence, lexicon: &TriggerLexicon) -> Vec<TriggerHit> {
    let tokens = sentence.normalized();
    let mut hits = Vec::new();
    let mut pos = 0;
    while pos < tokens.len() {
        match lexicon.match_at(&tokens, pos) {
            Some((len, role)) => {
                hits.push(TriggerHit {
                    position: pos,
                    len,
                    role,
                });
                pos += len;
            }
            None => pos += 1,
        }
    }
    hits
}

/// Window-classifier verdict for one entity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowVerdict {
    pub negated: bool,
    /// First-token position of the nearest trigger that negated the entity.
    pub trigger_position: Option<usize>,
}

fn entity_bounds(tokens: &[usize]) -> Option<(usize, usize)> {
    Some((*tokens.first()?, *tokens.last()?))
}

/// Classifies each entity (given as sorted token indices) against the
/// trigger windows. Entities must lie within the sentence.
pub fn negex_classify(
    sentence: &Sentence,
    entities: &[Vec<usize>],
    lexicon: &TriggerLexicon,
) -> Result<Vec<WindowVerdict>> {
    let n = sentence.len();
    for tokens in entities {
        if tokens.last().is_some_and(|&t| t >= n) {
            return Err(Error::LengthMismatch {
                context: "entity token beyond sentence".to_string(),
                expected: n,
                got: *tokens.last().unwrap() + 1,
            });
        }
    }
    let triggers = find_triggers(sentence, lexicon);
    let verdicts = entities
        .iter()
        .map(|tokens| {
            let Some((first, last)) = entity_bounds(tokens) else {
                return WindowVerdict {
                    negated: false,
                    trigger_position: None,
                };
            };
            let mut nearest: Option<(usize, usize)> = None; // (distance, position)
            for hit in &triggers {
                let in_window = match hit.role {
                    TriggerRole::Pseudo => false,
                    // Entity starts within the 6 tokens after the trigger.
                    TriggerRole::Pre => {
                        first >= hit.position + hit.len
                            && first - (hit.position + hit.len) < NEGATION_WINDOW
                    }
                    // Entity ends within the 6 tokens before the trigger.
                    TriggerRole::Post => {
                        last < hit.position && hit.position - 1 - last < NEGATION_WINDOW
                    }
                };
                if in_window {
                    let distance = token_distance(hit.position, tokens);
                    if nearest.map_or(true, |(d, _)| distance < d) {
                        nearest = Some((distance, hit.position));
                    }
                }
            }
            WindowVerdict {
                negated: nearest.is_some(),
                trigger_position: nearest.map(|(_, p)| p),
            }
        })
        .collect();
    Ok(verdicts)
}

/// Minimum token distance from a trigger position to any entity token.
fn token_distance(position: usize, entity_tokens: &[usize]) -> usize {
    entity_tokens
        .iter()
        .map(|&t| t.abs_diff(position))
        .min()
        .unwrap_or(usize::MAX)
}

/// A labeled directed dependency edge, token indices within one sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyEdge {
    pub head: usize,
    pub dependent: usize,
    pub label: String,
}

/// Per-sentence set of dependency edges.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DependencyGraph {
    pub edges: Vec<DependencyEdge>,
}

impl DependencyGraph {
    pub fn new(edges: Vec<DependencyEdge>) -> DependencyGraph {
        DependencyGraph { edges }
    }

    fn touches(&self, label: &str, token: usize) -> bool {
        self.edges
            .iter()
            .any(|e| e.label == label && (e.head == token || e.dependent == token))
    }

    fn has_label(&self, label: &str) -> bool {
        self.edges.iter().any(|e| e.label == label)
    }

    /// Tokens connected to `token` by an edge with `label`, either direction.
    fn neighbors<'a>(&'a self, label: &'a str, token: usize) -> impl Iterator<Item = usize> + 'a {
        self.edges.iter().filter_map(move |e| {
            if e.label != label {
                None
            } else if e.head == token {
                Some(e.dependent)
            } else if e.dependent == token {
                Some(e.head)
            } else {
                None
            }
        })
    }
}

/// Keeps only `neg` and `conj:or` edges. Idempotent.
pub fn filter_graph(graph: &DependencyGraph) -> DependencyGraph {
    DependencyGraph {
        edges: graph
            .edges
            .iter()
            .filter(|e| e.label == "neg" || e.label == "conj:or")
            .cloned()
            .collect(),
    }
}

/// Why an entity was (or was not) negated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Evidence {
    /// Rule 2: window classifier, closest entity, no neg edge in sentence.
    NegexWindow,
    /// Rule 1: an entity token in a `neg` relation.
    DepNeg,
    /// Rule 1: an entity token in `conj:or` with a word in a `neg` relation.
    DepConjOr,
    None,
}

impl Evidence {
    pub fn name(self) -> &'static str {
        match self {
            Evidence::NegexWindow => "negex-window",
            Evidence::DepNeg => "dep-neg",
            Evidence::DepConjOr => "dep-conj-or",
            Evidence::None => "none",
        }
    }
}

/// Final verdict for one entity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NegationDecision {
    pub entity_index: usize,
    pub negated: bool,
    pub evidence: Evidence,
}

/// Applies the hybrid rules. `window` must be aligned with `entities`
/// (usually the output of [`negex_classify`] on the same list); `graph`
/// is filtered internally, so passing an unfiltered graph is fine.
pub fn hybrid_classify(
    entities: &[Vec<usize>],
    window: &[WindowVerdict],
    graph: &DependencyGraph,
) -> Result<Vec<NegationDecision>> {
    if entities.len() != window.len() {
        return Err(Error::LengthMismatch {
            context: "window verdicts vs entities".to_string(),
            expected: entities.len(),
            got: window.len(),
        });
    }
    let graph = filter_graph(graph);
    let sentence_has_neg = graph.has_label("neg");

    let mut decisions = Vec::with_capacity(entities.len());
    for (idx, tokens) in entities.iter().enumerate() {
        // Rule 1: direct neg participation, then one-hop conj:or.
        if tokens.iter().any(|&t| graph.touches("neg", t)) {
            decisions.push(NegationDecision {
                entity_index: idx,
                negated: true,
                evidence: Evidence::DepNeg,
            });
            continue;
        }
        let via_conj = tokens.iter().any(|&t| {
            graph
                .neighbors("conj:or", t)
                .any(|other| graph.touches("neg", other))
        });
        if via_conj {
            decisions.push(NegationDecision {
                entity_index: idx,
                negated: true,
                evidence: Evidence::DepConjOr,
            });
            continue;
        }
        // Rule 2: window-negated, closest to its trigger, no neg edges.
        let verdict = window[idx];
        let negated = !sentence_has_neg
            && verdict.negated
            && verdict.trigger_position.is_some_and(|pos| {
                let own = token_distance(pos, tokens);
                entities
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != idx)
                    .all(|(_, other)| token_distance(pos, other) >= own)
            });
        decisions.push(NegationDecision {
            entity_index: idx,
            negated,
            evidence: if negated {
                Evidence::NegexWindow
            } else {
                Evidence::None
            },
        });
    }
    Ok(decisions)
}
