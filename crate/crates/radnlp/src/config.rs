//! Flat `key=value` configuration files.
//!
//! Lines are `key=value`; `#` starts a comment; blank lines are ignored.
//! Keys mirror the tagger hyperparameters (`d`, `k`, `max_len`, `epochs`,
//! `batch_size`, `learning_rate`, `momentum`, `clip_norm`,
//! `fine_tune_embeddings`, `use_peepholes`, `positionwise_projection`,
//! `seed`) plus corpus and embedding knobs (`min_count`, `window`,
//! `embedding_epochs`, `embedding_learning_rate`, `x_max`, `alpha`,
//! `p_replace`). Unknown keys are an error.

use std::path::Path;

use anyhow::{bail, Context, Result};

use radnlp_core::embeddings::GloveConfig;
use radnlp_core::tagger::TaggerConfig;

/// Everything a pipeline run needs beyond file locations.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub tagger: TaggerConfig,
    /// Vocabulary frequency threshold.
    pub min_count: u32,
    /// Co-occurrence window for the GloVe-style trainers.
    pub window: usize,
    /// Epochs for the embedding trainers (GloVe and corruption LM).
    pub embedding_epochs: usize,
    /// AdaGrad learning rate for the GloVe-style trainers.
    pub embedding_learning_rate: f64,
    pub x_max: f64,
    /// Ontology-penalty weight.
    pub alpha: f64,
    /// Corruption probability for the language-model embeddings.
    pub p_replace: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            tagger: TaggerConfig::default(),
            min_count: 3,
            window: 10,
            embedding_epochs: 25,
            embedding_learning_rate: 0.05,
            x_max: 100.0,
            alpha: 0.5,
            p_replace: 0.2,
        }
    }
}

impl PipelineConfig {
    pub fn glove_config(&self, alpha: f64, seed: u64) -> GloveConfig {
        GloveConfig {
            dim: self.tagger.embedding_dim,
            x_max: self.x_max,
            learning_rate: self.embedding_learning_rate,
            epochs: self.embedding_epochs,
            alpha,
            seed,
            ..GloveConfig::default()
        }
    }

    pub fn parse(text: &str) -> Result<PipelineConfig> {
        let mut config = PipelineConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("line {}: expected key=value, got `{raw}`", lineno + 1);
            };
            let (key, value) = (key.trim(), value.trim());
            config
                .apply(key, value)
                .with_context(|| format!("line {}: key `{key}`", lineno + 1))?;
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<PipelineConfig> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        PipelineConfig::parse(&text)
    }

    fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        let t = &mut self.tagger;
        match key {
            "d" | "embedding_dim" => t.embedding_dim = value.parse()?,
            "k" | "cell_size" => t.cell_size = value.parse()?,
            "max_len" => t.max_len = value.parse()?,
            "epochs" => t.epochs = value.parse()?,
            "batch_size" => t.batch_size = value.parse()?,
            "learning_rate" => t.learning_rate = value.parse()?,
            "momentum" => t.momentum = value.parse()?,
            "clip_norm" => t.clip_norm = value.parse()?,
            "fine_tune_embeddings" => t.fine_tune_embeddings = parse_bool(value)?,
            "use_peepholes" => t.use_peepholes = parse_bool(value)?,
            "positionwise_projection" => t.positionwise_projection = parse_bool(value)?,
            "seed" => t.seed = value.parse()?,
            "min_count" => self.min_count = value.parse()?,
            "window" => self.window = value.parse()?,
            "embedding_epochs" => self.embedding_epochs = value.parse()?,
            "embedding_learning_rate" => self.embedding_learning_rate = value.parse()?,
            "x_max" => self.x_max = value.parse()?,
            "alpha" => self.alpha = value.parse()?,
            "p_replace" => self.p_replace = value.parse()?,
            other => bail!("unknown configuration key `{other}`"),
        }
        Ok(())
    }

    /// Serializes in a fixed key order (the inverse of [`Self::parse`]).
    pub fn to_text(&self) -> String {
        let t = &self.tagger;
        let mut out = String::new();
        for (key, value) in [
            ("d", t.embedding_dim.to_string()),
            ("k", t.cell_size.to_string()),
            ("max_len", t.max_len.to_string()),
            ("epochs", t.epochs.to_string()),
            ("batch_size", t.batch_size.to_string()),
            ("learning_rate", t.learning_rate.to_string()),
            ("momentum", t.momentum.to_string()),
            ("clip_norm", t.clip_norm.to_string()),
            ("fine_tune_embeddings", t.fine_tune_embeddings.to_string()),
            ("use_peepholes", t.use_peepholes.to_string()),
            (
                "positionwise_projection",
                t.positionwise_projection.to_string(),
            ),
            ("seed", t.seed.to_string()),
            ("min_count", self.min_count.to_string()),
            ("window", self.window.to_string()),
            ("embedding_epochs", self.embedding_epochs.to_string()),
            (
                "embedding_learning_rate",
                self.embedding_learning_rate.to_string(),
            ),
            ("x_max", self.x_max.to_string()),
            ("alpha", self.alpha.to_string()),
            ("p_replace", self.p_replace.to_string()),
        ] {
            out.push_str(key);
            out.push('=');
            out.push_str(&value);
            out.push('\n');
        }
        out
    }
}

fn parse_bool(value: &str) -> Result<bool> {
    match value {
        "true" | "1" => Ok(true),
        "false" | "0" => Ok(false),
        other => bail!("expected true/false, got `{other}`"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_spec_style_keys() {
        let cfg = PipelineConfig::parse(
            "# comment\nd=16\nk=8\nmax_len=12\nepochs=5\nbatch_size=4\n\
             learning_rate=0.25\nfine_tune_embeddings=false\nseed=9\nmin_count=2\n",
        )
        .unwrap();
        assert_eq!(cfg.tagger.embedding_dim, 16);
        assert_eq!(cfg.tagger.cell_size, 8);
        assert_eq!(cfg.tagger.max_len, 12);
        assert_eq!(cfg.tagger.learning_rate, 0.25);
        assert!(!cfg.tagger.fine_tune_embeddings);
        assert_eq!(cfg.min_count, 2);
    }

    #[test]
    fn unknown_key_is_an_error() {
        assert!(PipelineConfig::parse("bogus=1\n").is_err());
    }

    #[test]
    fn round_trips_through_text() {
        let mut cfg = PipelineConfig::default();
        cfg.tagger.embedding_dim = 7;
        cfg.alpha = 2.0;
        let reparsed = PipelineConfig::parse(&cfg.to_text()).unwrap();
        assert_eq!(cfg, reparsed);
    }
}
