//! IOBES codec: span annotations to tag grids and back.
//!
//! Encoding writes, per entity, `S` for a single covered token and otherwise
//! `B` on the first covered token, `E` on the last, `I` on interior covered
//! tokens; uncovered tokens keep `O`, including the gap tokens of a disjoint
//! entity. Negated entities repeat their tag shape in the negation channel.
//!
//! Decoding is tolerant: malformed tag runs are coerced to the nearest valid
//! reading and a repair count is reported, so noisy model output never fails.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{channel_name, Sentence, StandoffAnnotation, Tag, TagGrid, NEGATION_CHANNEL, NUM_CHANNELS};
use crate::error::{Error, Result};

/// A decoded entity: the channel it lives in and the covered token indices
/// (sorted; non-contiguous for disjoint entities).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entity {
    pub channel: usize,
    pub tokens: Vec<usize>,
}

impl Entity {
    pub fn first(&self) -> usize {
        self.tokens[0]
    }

    pub fn last(&self) -> usize {
        self.tokens[self.tokens.len() - 1]
    }
}

/// Result of decoding a grid: entities plus the number of repairs applied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodedEntities {
    pub entities: Vec<Entity>,
    pub repairs: usize,
}

/// Converts span annotations into a tag grid for one sentence.
///
/// Tokens partially covered by a span count as covered. Annotations covering
/// no token of this sentence are ignored. Two entities claiming intersecting
/// token ranges in the same channel are an error; so are two negated
/// entities whose ranges intersect (they collide in the negation channel).
pub fn standoff_to_iobes(
    sentence: &Sentence,
    annotations: &[StandoffAnnotation],
) -> Result<TagGrid> {
    let mut grid = TagGrid::new(sentence.len());
    // (first, last, entity_id) per channel, for interval-overlap checks.
    let mut placed: [Vec<(usize, usize, String)>; NUM_CHANNELS] = Default::default();

    for ann in annotations {
        let covered = covered_tokens(sentence, &ann.spans);
        if covered.is_empty() {
            continue;
        }
        let mut channels = alloc::vec![ann.class.channel()];
        if ann.negated {
            channels.push(NEGATION_CHANNEL);
        }
        for channel in channels {
            check_interval(&placed[channel], &covered, channel, &ann.entity_id)?;
            placed[channel].push((
                *covered.first().unwrap(),
                *covered.last().unwrap(),
                ann.entity_id.clone(),
            ));
            write_shape(&mut grid, channel, &covered);
        }
    }
    Ok(grid)
}

/// Token indices overlapped by any of the byte spans.
fn covered_tokens(sentence: &Sentence, spans: &[(usize, usize)]) -> BTreeSet<usize> {
    let mut covered = BTreeSet::new();
    for (idx, token) in sentence.tokens.iter().enumerate() {
        let (ts, te) = token.char_span;
        if spans.iter().any(|&(s, e)| s < te && ts < e) {
            covered.insert(idx);
        }
    }
    covered
}

fn check_interval(
    placed: &[(usize, usize, String)],
    covered: &BTreeSet<usize>,
    channel: usize,
    entity_id: &str,
) -> Result<()> {
    let (first, last) = (*covered.first().unwrap(), *covered.last().unwrap());
    for (pf, pl, pid) in placed {
        if first <= *pl && *pf <= last {
            return Err(Error::OverlappingEntities {
                channel: channel_name(channel).to_string(),
                first: pid.clone(),
                second: entity_id.to_string(),
            });
        }
    }
    Ok(())
}

fn write_shape(grid: &mut TagGrid, channel: usize, covered: &BTreeSet<usize>) {
    if covered.len() == 1 {
        grid.set(*covered.first().unwrap(), channel, Tag::Single);
        return;
    }
    let first = *covered.first().unwrap();
    let last = *covered.last().unwrap();
    for &t in covered {
        let tag = if t == first {
            Tag::Begin
        } else if t == last {
            Tag::End
        } else {
            Tag::Inside
        };
        grid.set(t, channel, tag);
    }
}

/// Decodes a grid back into entities, tolerating malformed runs.
///
/// Per channel: `S` is a singleton; `B` opens an entity that collects `I`
/// tokens, skips `O` tokens, and closes at the next `E`. Repairs: an `I` or
/// `E` with no open entity becomes a singleton; a dangling open entity closes
/// at its last collected token; a `B` or `S` while an entity is open first
/// force-closes the open one.
pub fn iobes_to_entities(grid: &TagGrid) -> DecodedEntities {
    let mut entities = Vec::new();
    let mut repairs = 0usize;

    for channel in 0..NUM_CHANNELS {
        let mut open: Option<Vec<usize>> = None;
        for t in 0..grid.n_tokens() {
            match grid.get(t, channel) {
                Tag::Outside => {}
                Tag::Single => {
                    if let Some(tokens) = open.take() {
                        // S inside an open entity: close the run early.
                        repairs += 1;
                        entities.push(Entity { channel, tokens });
                    }
                    entities.push(Entity {
                        channel,
                        tokens: alloc::vec![t],
                    });
                }
                Tag::Begin => {
                    if let Some(tokens) = open.take() {
                        repairs += 1;
                        entities.push(Entity { channel, tokens });
                    }
                    open = Some(alloc::vec![t]);
                }
                Tag::Inside => match open.as_mut() {
                    Some(tokens) => tokens.push(t),
                    None => {
                        // Isolated I: coerce to a singleton.
                        repairs += 1;
                        entities.push(Entity {
                            channel,
                            tokens: alloc::vec![t],
                        });
                    }
                },
                Tag::End => match open.take() {
                    Some(mut tokens) => {
                        tokens.push(t);
                        entities.push(Entity { channel, tokens });
                    }
                    None => {
                        repairs += 1;
                        entities.push(Entity {
                            channel,
                            tokens: alloc::vec![t],
                        });
                    }
                },
            }
        }
        if let Some(tokens) = open.take() {
            // Dangling B: close at the last collected token.
            repairs += 1;
            entities.push(Entity { channel, tokens });
        }
    }

    entities.sort_by_key(|e| (e.channel, e.first()));
    DecodedEntities { entities, repairs }
}

/// Builds one grid per sentence for a whole report.
///
/// Every annotation must cover tokens of exactly one sentence: covering none
/// is [`Error::SpanOutOfBounds`], covering several is
/// [`Error::SentenceStraddle`].
pub fn grids_for_report(
    sentences: &[Sentence],
    annotations: &[StandoffAnnotation],
) -> Result<Vec<TagGrid>> {
    let mut per_sentence: Vec<Vec<StandoffAnnotation>> =
        alloc::vec![Vec::new(); sentences.len()];
    for ann in annotations {
        let mut hits = Vec::new();
        for (idx, sentence) in sentences.iter().enumerate() {
            if !covered_tokens(sentence, &ann.spans).is_empty() {
                hits.push(idx);
            }
        }
        match hits.as_slice() {
            [] => {
                return Err(Error::SpanOutOfBounds {
                    entity_id: ann.entity_id.clone(),
                })
            }
            [one] => per_sentence[*one].push(ann.clone()),
            _ => {
                return Err(Error::SentenceStraddle {
                    entity_id: ann.entity_id.clone(),
                })
            }
        }
    }
    sentences
        .iter()
        .zip(&per_sentence)
        .map(|(s, anns)| standoff_to_iobes(s, anns))
        .collect()
}
