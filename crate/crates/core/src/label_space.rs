//! Ordered class sets with IOB2 prefix structure.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Class names of the unmerged CoNLL-2003 label space, in the order used by
/// most published token classifiers for this dataset.
pub const CONLL2003_CLASSES: [&str; 9] = [
    "O", "B-MISC", "I-MISC", "B-PER", "I-PER", "B-ORG", "I-ORG", "B-LOC", "I-LOC",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Prefix {
    Begin,
    Inside,
}

/// How a class name decomposes into an optional IOB2 prefix and an entity type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassInfo {
    pub prefix: Option<Prefix>,
    /// Entity type, e.g. `LOC` for `B-LOC`. The non-entity class carries its own name.
    pub entity: String,
}

impl ClassInfo {
    fn parse(name: &str) -> Self {
        let split = |p: &str| name.strip_prefix(p).filter(|rest| !rest.is_empty());
        if let Some(rest) = split("B-") {
            ClassInfo {
                prefix: Some(Prefix::Begin),
                entity: rest.to_string(),
            }
        } else if let Some(rest) = split("I-") {
            ClassInfo {
                prefix: Some(Prefix::Inside),
                entity: rest.to_string(),
            }
        } else {
            ClassInfo {
                prefix: None,
                entity: name.to_string(),
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelSpace {
    classes: Vec<String>,
    other_class: usize,
    info: Vec<ClassInfo>,
    index: HashMap<String, usize>,
}

impl LabelSpace {
    /// Builds a label space from class names. The non-entity class must be named `O`.
    pub fn new<S: AsRef<str>>(classes: &[S]) -> Result<Self> {
        if classes.is_empty() {
            return Err(Error::LabelSpace("no classes".into()));
        }
        let classes: Vec<String> = classes.iter().map(|c| c.as_ref().to_string()).collect();
        let mut index = HashMap::with_capacity(classes.len());
        for (i, name) in classes.iter().enumerate() {
            if name.is_empty() || name.chars().any(char::is_whitespace) {
                return Err(Error::LabelSpace(format!("invalid class name {name:?}")));
            }
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::LabelSpace(format!("duplicate class {name:?}")));
            }
        }
        let other_class = *index
            .get("O")
            .ok_or_else(|| Error::LabelSpace("missing non-entity class \"O\"".into()))?;
        let info = classes.iter().map(|c| ClassInfo::parse(c)).collect();
        Ok(LabelSpace {
            classes,
            other_class,
            info,
            index,
        })
    }

    pub fn conll2003() -> Self {
        Self::new(&CONLL2003_CLASSES).expect("static class list is valid")
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn other_class(&self) -> usize {
        self.other_class
    }

    pub fn name(&self, class: usize) -> &str {
        &self.classes[class]
    }

    pub fn info(&self, class: usize) -> &ClassInfo {
        &self.info[class]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// True when no class carries a `B-`/`I-` prefix.
    pub fn is_merged(&self) -> bool {
        self.info.iter().all(|i| i.prefix.is_none())
    }

    /// The prefix-free space and, for every class of `self`, its index in it.
    ///
    /// Merged classes keep the order in which their entity type first appears;
    /// `O` keeps its position relative to the others.
    pub fn merged(&self) -> (LabelSpace, Vec<usize>) {
        let mut names: Vec<String> = Vec::new();
        let mut mapping = Vec::with_capacity(self.len());
        for info in &self.info {
            let pos = match names.iter().position(|n| *n == info.entity) {
                Some(p) => p,
                None => {
                    names.push(info.entity.clone());
                    names.len() - 1
                }
            };
            mapping.push(pos);
        }
        let merged = LabelSpace::new(&names).expect("merged names are unique and include O");
        (merged, mapping)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conll_space_merges_to_five_classes() {
        let space = LabelSpace::conll2003();
        assert!(!space.is_merged());
        let (merged, map) = space.merged();
        assert_eq!(merged.classes(), ["O", "MISC", "PER", "ORG", "LOC"]);
        assert!(merged.is_merged());
        assert_eq!(map, vec![0, 1, 1, 2, 2, 3, 3, 4, 4]);
        assert_eq!(merged.other_class(), 0);
    }

    #[test]
    fn rejects_duplicates_and_missing_o() {
        assert!(LabelSpace::new(&["O", "PER", "PER"]).is_err());
        assert!(LabelSpace::new(&["PER", "LOC"]).is_err());
        assert!(LabelSpace::new::<&str>(&[]).is_err());
    }

    #[test]
    fn bare_prefix_is_not_a_prefixed_class() {
        let space = LabelSpace::new(&["O", "B-"]).unwrap();
        assert_eq!(space.info(1).prefix, None);
    }
}
