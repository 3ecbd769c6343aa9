//! Term dictionary construction from ontology trees.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::corpus::{EntityClass, Lemmatizer};
use crate::embeddings::OntologyTree;
use crate::error::{Error, Result};

/// Where a dictionary entry came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Provenance {
    Ontology,
    Manual,
    Redirect,
}

impl Provenance {
    pub fn name(self) -> &'static str {
        match self {
            Provenance::Ontology => "ontology",
            Provenance::Manual => "manual",
            Provenance::Redirect => "redirect",
        }
    }

    pub fn parse(s: &str) -> Option<Provenance> {
        match s {
            "ontology" => Some(Provenance::Ontology),
            "manual" => Some(Provenance::Manual),
            "redirect" => Some(Provenance::Redirect),
            _ => None,
        }
    }
}

/// One group a term belongs to. A key may carry several entries when
/// different ontology branches assign different groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DictEntry {
    pub group: EntityClass,
    pub provenance: Provenance,
}

/// Normalized term -> semantic group(s).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TermDictionary {
    entries: BTreeMap<String, Vec<DictEntry>>,
}

impl TermDictionary {
    pub fn new() -> TermDictionary {
        TermDictionary::default()
    }

    /// Adds an entry; a duplicate group for the same key is ignored.
    /// Keys must already be normalized.
    pub fn insert(&mut self, key: &str, entry: DictEntry) {
        let slot = self.entries.entry(key.to_string()).or_default();
        if !slot.iter().any(|e| e.group == entry.group) {
            slot.push(entry);
            slot.sort_by_key(|e| e.group);
        }
    }

    /// Replaces all entries of a key (manual-override semantics).
    pub fn replace(&mut self, key: &str, entries: Vec<DictEntry>) {
        self.entries.insert(key.to_string(), entries);
    }

    pub fn get(&self, key: &str) -> Option<&[DictEntry]> {
        self.entries.get(key).map(Vec::as_slice)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[DictEntry])> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }
}

/// Manual assignment of ontology concepts to semantic groups.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroupMapping {
    map: BTreeMap<String, EntityClass>,
}

impl GroupMapping {
    pub fn new() -> GroupMapping {
        GroupMapping::default()
    }

    pub fn insert(&mut self, concept_id: &str, group: EntityClass) {
        self.map.insert(concept_id.to_string(), group);
    }

    pub fn get(&self, concept_id: &str) -> Option<EntityClass> {
        self.map.get(concept_id).copied()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Counters from a dictionary build.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DictionaryBuildReport {
    pub ontology_entries: usize,
    pub manual_entries: usize,
    /// Concepts with no group-mapped ancestor.
    pub skipped_unmapped: usize,
    /// Keys whose ontology entries were overridden by manual terms.
    pub overridden: usize,
}

/// Normalizes a (possibly multi-word) label the same way the corpus
/// tokenizer normalizes words.
fn normalize_label(label: &str, lemmatizer: &Lemmatizer) -> String {
    let mut parts: Vec<String> = Vec::new();
    for token in label.split_whitespace() {
        parts.push(lemmatizer.normalize(token));
    }
    parts.join(" ")
}

/// Builds a dictionary from every tree concept whose ancestor chain
/// (starting at the concept itself) reaches a group-mapped concept; manual
/// terms override ontology entries on key collision.
pub fn build_dictionary(
    tree: &OntologyTree,
    mapping: &GroupMapping,
    manual_terms: &[(String, EntityClass)],
) -> Result<(TermDictionary, DictionaryBuildReport)> {
    if mapping.is_empty() {
        return Err(Error::EmptyInput("group mapping".to_string()));
    }
    let lemmatizer = Lemmatizer::new();
    let mut dict = TermDictionary::new();
    let mut report = DictionaryBuildReport::default();

    for id in tree.concept_ids() {
        let Some(label) = tree.label(id) else {
            continue;
        };
        let group = resolve_group(tree, mapping, id);
        let Some(group) = group else {
            report.skipped_unmapped += 1;
            continue;
        };
        let key = normalize_label(label, &lemmatizer);
        if key.is_empty() {
            continue;
        }
        dict.insert(
            &key,
            DictEntry {
                group,
                provenance: Provenance::Ontology,
            },
        );
        report.ontology_entries += 1;
    }

    let mut manual_keys: BTreeMap<String, Vec<DictEntry>> = BTreeMap::new();
    for (term, group) in manual_terms {
        let key = normalize_label(term, &lemmatizer);
        if key.is_empty() {
            continue;
        }
        let slot = manual_keys.entry(key).or_default();
        if !slot.iter().any(|e| e.group == *group) {
            slot.push(DictEntry {
                group: *group,
                provenance: Provenance::Manual,
            });
            slot.sort_by_key(|e| e.group);
        }
    }
    for (key, mut entries) in manual_keys {
        entries.sort_by_key(|e| e.group);
        if dict.contains(&key) {
            report.overridden += 1;
        }
        report.manual_entries += entries.len();
        dict.replace(&key, entries);
    }
    Ok((dict, report))
}

fn resolve_group(tree: &OntologyTree, mapping: &GroupMapping, id: &str) -> Option<EntityClass> {
    if let Some(group) = mapping.get(id) {
        return Some(group);
    }
    tree.ancestors(id).into_iter().find_map(|a| mapping.get(a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embeddings::OntologyEdge;

    fn edge(child: &str, parent: Option<&str>, label: &str) -> OntologyEdge {
        OntologyEdge {
            child_id: child.to_string(),
            parent_id: parent.map(str::to_string),
            child_label: label.to_string(),
        }
    }

    fn toy() -> (OntologyTree, GroupMapping) {
        let tree = OntologyTree::new([
            edge("R1", None, "entity"),
            edge("R2", Some("R1"), "anatomical entity"),
            edge("R3", Some("R2"), "heart"),
            edge("R4", Some("R2"), "left costophrenic angle"),
            edge("R5", Some("R1"), "orphan thing"),
        ])
        .unwrap();
        let mut mapping = GroupMapping::new();
        mapping.insert("R2", EntityClass::BodyLocation);
        (tree, mapping)
    }

    #[test]
    fn ancestor_walk_assigns_group() {
        let (tree, mapping) = toy();
        let (dict, report) = build_dictionary(&tree, &mapping, &[]).unwrap();
        let heart = dict.get("heart").unwrap();
        assert_eq!(heart[0].group, EntityClass::BodyLocation);
        assert_eq!(heart[0].provenance, Provenance::Ontology);
        // Multi-word labels become multi-word normalized keys.
        assert!(dict.contains("left costophrenic angle"));
        // "entity" (root, above the mapping) and "orphan thing" are skipped.
        assert_eq!(report.skipped_unmapped, 2);
    }

    #[test]
    fn mapped_concept_maps_its_own_label() {
        let (tree, mapping) = toy();
        let (dict, _) = build_dictionary(&tree, &mapping, &[]).unwrap();
        assert!(dict.contains("anatomical entity"));
    }

    #[test]
    fn manual_terms_override_on_collision() {
        let (tree, mapping) = toy();
        let manual = alloc::vec![("heart".to_string(), EntityClass::ClinicalFinding)];
        let (dict, report) = build_dictionary(&tree, &mapping, &manual).unwrap();
        let heart = dict.get("heart").unwrap();
        assert_eq!(heart.len(), 1);
        assert_eq!(heart[0].group, EntityClass::ClinicalFinding);
        assert_eq!(heart[0].provenance, Provenance::Manual);
        assert_eq!(report.overridden, 1);
    }

    #[test]
    fn empty_mapping_is_an_error() {
        let (tree, _) = toy();
        assert!(build_dictionary(&tree, &GroupMapping::new(), &[]).is_err());
    }

    #[test]
    fn multiple_groups_per_key_allowed() {
        let mut dict = TermDictionary::new();
        dict.insert(
            "heart",
            DictEntry {
                group: EntityClass::BodyLocation,
                provenance: Provenance::Ontology,
            },
        );
        dict.insert(
            "heart",
            DictEntry {
                group: EntityClass::ClinicalFinding,
                provenance: Provenance::Ontology,
            },
        );
        assert_eq!(dict.get("heart").unwrap().len(), 2);
    }

    #[test]
    fn dictionary_keys_are_lemmatized() {
        let tree = OntologyTree::new([edge("X", None, "Pleural Effusions")]).unwrap();
        let mut mapping = GroupMapping::new();
        mapping.insert("X", EntityClass::ClinicalFinding);
        let (dict, _) = build_dictionary(&tree, &mapping, &[]).unwrap();
        assert!(dict.contains("pleural effusion"));
    }
}
