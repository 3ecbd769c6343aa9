//! Report text handling: tokenization, normalization, vocabularies, and the
//! IOBES tag-grid codec.
//!
//! A report is tokenized into [`Sentence`]s of [`Token`]s whose byte spans
//! index the source text. Span annotations ([`StandoffAnnotation`]) convert to
//! per-channel IOBES tags ([`TagGrid`]) and back. The tag channels are fixed,
//! in order: the four semantic groups of [`EntityClass`] followed by the
//! negation channel, so serialized grids are portable.

mod iobes;
mod lemma;
mod tokenize;
mod vocab;

pub use iobes::{grids_for_report, iobes_to_entities, standoff_to_iobes, DecodedEntities, Entity};
pub use lemma::Lemmatizer;
pub use tokenize::tokenize_and_split;
pub use vocab::{build_vocabulary, Vocabulary, UNKNOWN_SYMBOL};

use alloc::string::String;
use alloc::vec::Vec;

/// Number of tag channels: four semantic groups plus negation.
pub const NUM_CHANNELS: usize = 5;

/// Channel index holding negation tags.
pub const NEGATION_CHANNEL: usize = 4;

/// Number of IOBES tags.
pub const NUM_TAGS: usize = 5;

/// The four semantic groups of the annotation schema.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EntityClass {
    BodyLocation,
    ClinicalFinding,
    Descriptor,
    MedicalDevice,
}

impl EntityClass {
    pub const ALL: [EntityClass; 4] = [
        EntityClass::BodyLocation,
        EntityClass::ClinicalFinding,
        EntityClass::Descriptor,
        EntityClass::MedicalDevice,
    ];

    /// Channel index of this class in a [`TagGrid`].
    pub fn channel(self) -> usize {
        match self {
            EntityClass::BodyLocation => 0,
            EntityClass::ClinicalFinding => 1,
            EntityClass::Descriptor => 2,
            EntityClass::MedicalDevice => 3,
        }
    }

    pub fn from_channel(channel: usize) -> Option<EntityClass> {
        Self::ALL.get(channel).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            EntityClass::BodyLocation => "BodyLocation",
            EntityClass::ClinicalFinding => "ClinicalFinding",
            EntityClass::Descriptor => "Descriptor",
            EntityClass::MedicalDevice => "MedicalDevice",
        }
    }

    pub fn parse(name: &str) -> Option<EntityClass> {
        Self::ALL.iter().copied().find(|c| c.name() == name)
    }
}

/// Channel display name, including the negation channel.
pub fn channel_name(channel: usize) -> &'static str {
    match channel {
        0 => "BodyLocation",
        1 => "ClinicalFinding",
        2 => "Descriptor",
        3 => "MedicalDevice",
        4 => "Negation",
        _ => "?",
    }
}

/// An IOBES tag. The index order `[I, O, B, E, S]` is fixed for
/// serialization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum Tag {
    Inside = 0,
    Outside = 1,
    Begin = 2,
    End = 3,
    Single = 4,
}

impl Tag {
    pub const ALL: [Tag; NUM_TAGS] = [Tag::Inside, Tag::Outside, Tag::Begin, Tag::End, Tag::Single];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Tag> {
        Self::ALL.get(index).copied()
    }

    pub fn letter(self) -> char {
        match self {
            Tag::Inside => 'I',
            Tag::Outside => 'O',
            Tag::Begin => 'B',
            Tag::End => 'E',
            Tag::Single => 'S',
        }
    }

    pub fn from_letter(letter: char) -> Option<Tag> {
        match letter {
            'I' => Some(Tag::Inside),
            'O' => Some(Tag::Outside),
            'B' => Some(Tag::Begin),
            'E' => Some(Tag::End),
            'S' => Some(Tag::Single),
            _ => None,
        }
    }
}

/// A single token with its byte span into the source report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    /// Lower-cased, lemmatized form; see [`Lemmatizer`].
    pub normalized: String,
    /// Half-open byte range `(start, end)` into the report text.
    pub char_span: (usize, usize),
}

/// An ordered run of tokens from one report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub tokens: Vec<Token>,
    pub report_id: String,
}

impl Sentence {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Normalized forms of the tokens, in order.
    pub fn normalized(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.normalized.as_str()).collect()
    }
}

/// A span annotation in the style of standoff annotation tools: one entity,
/// possibly split over several disjoint byte ranges, with a negation flag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StandoffAnnotation {
    pub entity_id: String,
    pub class: EntityClass,
    /// Byte ranges into the report text, sorted and pairwise disjoint.
    pub spans: Vec<(usize, usize)>,
    pub negated: bool,
}

/// Per-sentence `n x 5` matrix of IOBES tags, row-major `[token][channel]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagGrid {
    n_tokens: usize,
    tags: Vec<Tag>,
}

impl TagGrid {
    /// All-Outside grid for a sentence of `n_tokens` tokens.
    pub fn new(n_tokens: usize) -> TagGrid {
        TagGrid {
            n_tokens,
            tags: alloc::vec![Tag::Outside; n_tokens * NUM_CHANNELS],
        }
    }

    pub fn n_tokens(&self) -> usize {
        self.n_tokens
    }

    pub fn get(&self, token: usize, channel: usize) -> Tag {
        self.tags[token * NUM_CHANNELS + channel]
    }

    pub fn set(&mut self, token: usize, channel: usize, tag: Tag) {
        self.tags[token * NUM_CHANNELS + channel] = tag;
    }

    /// The five tags of one token, in channel order.
    pub fn row(&self, token: usize) -> &[Tag] {
        &self.tags[token * NUM_CHANNELS..(token + 1) * NUM_CHANNELS]
    }

    /// Tags of one channel across all tokens.
    pub fn channel(&self, channel: usize) -> Vec<Tag> {
        (0..self.n_tokens).map(|t| self.get(t, channel)).collect()
    }

    /// Builds a grid from per-channel tag rows; panics if lengths disagree.
    pub fn from_channels(channels: &[Vec<Tag>; NUM_CHANNELS]) -> TagGrid {
        let n = channels[0].len();
        let mut grid = TagGrid::new(n);
        for (ch, tags) in channels.iter().enumerate() {
            assert_eq!(tags.len(), n, "channel length mismatch");
            for (t, &tag) in tags.iter().enumerate() {
                grid.set(t, ch, tag);
            }
        }
        grid
    }
}
