use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::actions::ActionType;
use crate::symbols::{SymbolId, Vocabulary};

use super::ModelError;

/// Symbol categories that can be ablated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Category {
    /// `R`, `I`, `D`, `BI`, `BD`.
    Editing,
    /// `MC`, `MS`.
    Mouse,
    /// Every `W`.
    Wait,
    /// The `W` symbols before the first edit.
    FirstWait,
}

impl Category {
    pub const ALL: [Category; 4] = [Category::Editing, Category::Mouse, Category::Wait, Category::FirstWait];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Editing => "editing",
            Category::Mouse => "mouse",
            Category::Wait => "wait",
            Category::FirstWait => "first_wait",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Category::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown category {s}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ablation {
    /// Remove symbols of these categories.
    Drop(BTreeSet<Category>),
    /// Keep only these categories plus `S`; jumps are removed.
    Only(BTreeSet<Category>),
}

impl Ablation {
    pub fn drop(cats: &[Category]) -> Self {
        Ablation::Drop(cats.iter().copied().collect())
    }

    pub fn only(cats: &[Category]) -> Self {
        Ablation::Only(cats.iter().copied().collect())
    }

    /// `full`, `drop:mouse`, `only:editing+mouse`, ...
    pub fn name(&self) -> String {
        let join = |s: &BTreeSet<Category>| s.iter().map(|c| c.as_str()).collect::<Vec<_>>().join("+");
        match self {
            Ablation::Drop(s) if s.is_empty() => "full".into(),
            Ablation::Drop(s) => format!("drop:{}", join(s)),
            Ablation::Only(s) => format!("only:{}", join(s)),
        }
    }
}

impl FromStr for Ablation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "full" {
            return Ok(Ablation::Drop(BTreeSet::new()));
        }
        let (mode, cats) = s.split_once(':').ok_or_else(|| format!("bad ablation {s}"))?;
        let cats = cats
            .split('+')
            .map(Category::from_str)
            .collect::<Result<BTreeSet<_>, _>>()?;
        match mode {
            "drop" => Ok(Ablation::Drop(cats)),
            "only" => Ok(Ablation::Only(cats)),
            _ => Err(format!("bad ablation mode {mode}")),
        }
    }
}

/// Filters a symbolized sequence by category.
pub fn ablate_sequence(ids: &[SymbolId], vocab: &Vocabulary, ablation: &Ablation) -> Result<Vec<SymbolId>, ModelError> {
    let kinds = ids
        .iter()
        .map(|&id| vocab.decode(id).map(|s| s.kind))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| ModelError::Symbol(e.to_string()))?;
    let first_edit = kinds.iter().position(|k| k.is_edit()).unwrap_or(kinds.len());
    let has = |set: &BTreeSet<Category>, c| set.contains(&c);
    let kept: Vec<(SymbolId, ActionType)> = ids
        .iter()
        .zip(&kinds)
        .enumerate()
        .filter(|&(i, (_, &k))| {
            let leading_wait = k == ActionType::W && i < first_edit;
            let selected = |set: &BTreeSet<Category>| {
                (k.is_edit() && has(set, Category::Editing))
                    || (matches!(k, ActionType::MC | ActionType::MS) && has(set, Category::Mouse))
                    || (k == ActionType::W && has(set, Category::Wait))
                    || (leading_wait && has(set, Category::FirstWait))
            };
            match ablation {
                Ablation::Drop(set) => !selected(set),
                Ablation::Only(set) => k == ActionType::S || selected(set),
            }
        })
        .map(|(_, (&id, &k))| (id, k))
        .collect();
    if kept.iter().all(|&(_, k)| k == ActionType::S) {
        return Err(ModelError::EmptyAfterAblation);
    }
    let out = kept.into_iter().map(|(id, _)| id).collect();
    Ok(out)
}
