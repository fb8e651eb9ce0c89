use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::SeedableRng;

use crate::neural::Rng;

use super::EditorError;

/// Sessions per editor in each split.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitSizes {
    pub train: usize,
    pub dev: usize,
    pub test: usize,
}

impl SplitSizes {
    pub fn total(&self) -> usize {
        self.train + self.dev + self.test
    }

    fn as_array(&self) -> [usize; 3] {
        [self.train, self.dev, self.test]
    }
}

/// Indices into the input corpus, sorted ascending within each split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Splits {
    /// Selected editors, most sessions first.
    pub editors: Vec<String>,
    pub train: Vec<usize>,
    pub dev: Vec<usize>,
    pub test: Vec<usize>,
}

/// Selects the `k` editors with most sessions and draws exactly `sizes`
/// sessions per editor and split, keeping every document in one split.
///
/// `sessions` holds `(editor_id, doc_id)` per corpus entry. Documents are
/// visited in seeded random order and assigned greedily to the split whose
/// involved editors are least filled.
pub fn balance_dataset(
    sessions: &[(String, String)],
    k: usize,
    sizes: SplitSizes,
    seed: u64,
) -> Result<Splits, EditorError> {
    let need = sizes.total();
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for (e, _) in sessions {
        *counts.entry(e.as_str()).or_default() += 1;
    }
    let mut ranked: Vec<(&str, usize)> = counts.into_iter().filter(|&(_, n)| n >= need).collect();
    if ranked.len() < k || k == 0 {
        return Err(EditorError::NotEnoughEditors {
            needed: k,
            found: ranked.len(),
        });
    }
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    let editors: Vec<String> = ranked[..k].iter().map(|(e, _)| (*e).to_owned()).collect();
    let slot: HashMap<&str, usize> = editors.iter().enumerate().map(|(i, e)| (e.as_str(), i)).collect();

    let mut by_doc: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, (e, d)) in sessions.iter().enumerate() {
        if slot.contains_key(e.as_str()) {
            by_doc.entry(d.as_str()).or_default().push(i);
        }
    }
    let mut rng = Rng::seed_from_u64(seed);
    let mut docs: Vec<(&str, Vec<usize>)> = by_doc.into_iter().collect();
    docs.shuffle(&mut rng);
    for (_, idx) in &mut docs {
        idx.shuffle(&mut rng);
    }

    let cap = sizes.as_array();
    let mut filled = vec![[0usize; 3]; k];
    let mut out: [Vec<usize>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for (_, idx) in &docs {
        let involved: Vec<usize> = idx.iter().map(|&i| slot[sessions[i].0.as_str()]).collect();
        // fraction of the most-filled involved editor, per split
        let load = |s: usize| -> f64 {
            if cap[s] == 0 {
                return f64::INFINITY;
            }
            involved
                .iter()
                .map(|&e| filled[e][s] as f64 / cap[s] as f64)
                .fold(0.0, f64::max)
        };
        let split = (0..3)
            .min_by(|&a, &b| load(a).total_cmp(&load(b)))
            .expect("three splits");
        if !load(split).is_finite() || load(split) >= 1.0 {
            continue;
        }
        for (&i, &e) in idx.iter().zip(&involved) {
            if filled[e][split] < cap[split] {
                filled[e][split] += 1;
                out[split].push(i);
            }
        }
    }
    for (e, f) in editors.iter().zip(&filled) {
        for s in 0..3 {
            if f[s] < cap[s] {
                return Err(EditorError::NotEnoughSessions {
                    editor: e.clone(),
                    needed: need,
                    found: f.iter().sum(),
                });
            }
        }
    }
    for v in &mut out {
        v.sort_unstable();
    }
    let [train, dev, test] = out;
    Ok(Splits {
        editors,
        train,
        dev,
        test,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn corpus(per_editor: &[(&str, usize)]) -> Vec<(String, String)> {
        let mut v = Vec::new();
        for (e, n) in per_editor {
            for i in 0..*n {
                v.push((e.to_string(), format!("{e}-doc{i}")));
            }
        }
        v
    }

    #[test]
    fn selects_top_editors_with_exact_counts() {
        let c = corpus(&[("a", 1200), ("b", 1150), ("c", 40)]);
        let sizes = SplitSizes {
            train: 998,
            dev: 58,
            test: 58,
        };
        let s = balance_dataset(&c, 2, sizes, 1).unwrap();
        assert_eq!(s.editors, vec!["a", "b"]);
        for (split, n) in [(&s.train, 998), (&s.dev, 58), (&s.test, 58)] {
            for e in ["a", "b"] {
                assert_eq!(split.iter().filter(|&&i| c[i].0 == e).count(), n);
            }
        }
        assert_eq!(s, balance_dataset(&c, 2, sizes, 1).unwrap());
        assert_ne!(s, balance_dataset(&c, 2, sizes, 2).unwrap());
    }

    #[test]
    fn too_many_editors_requested() {
        let c = corpus(&[("a", 10), ("b", 3)]);
        let sizes = SplitSizes { train: 4, dev: 1, test: 1 };
        assert_eq!(
            balance_dataset(&c, 2, sizes, 0),
            Err(EditorError::NotEnoughEditors { needed: 2, found: 1 })
        );
    }

    #[test]
    fn shared_documents_stay_in_one_split() {
        // every document edited by both editors
        let mut c = Vec::new();
        for d in 0..30 {
            for e in ["x", "y"] {
                c.push((e.to_string(), format!("d{d}")));
            }
        }
        let sizes = SplitSizes { train: 10, dev: 3, test: 3 };
        let s = balance_dataset(&c, 2, sizes, 5).unwrap();
        let docs = |v: &[usize]| v.iter().map(|&i| c[i].1.clone()).collect::<HashSet<_>>();
        let (tr, dv, te) = (docs(&s.train), docs(&s.dev), docs(&s.test));
        assert!(tr.is_disjoint(&dv) && tr.is_disjoint(&te) && dv.is_disjoint(&te));
        assert_eq!(s.train.len(), 20);
        assert_eq!(s.test.len(), 6);
    }
}
