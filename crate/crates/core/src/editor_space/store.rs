use std::collections::{HashMap, VecDeque};
use std::sync::RwLock;

use crate::scalar::Scalar;

use super::{mean_vector, EditorError};

pub const DEFAULT_CAPACITY: usize = 10;

/// Per-editor FIFO of the most recent session vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicStore<S> {
    dim: usize,
    capacity: usize,
    editors: HashMap<String, VecDeque<Vec<S>>>,
}

impl<S: Scalar> DynamicStore<S> {
    pub fn new(dim: usize) -> Self {
        Self::with_capacity(dim, DEFAULT_CAPACITY)
    }

    pub fn with_capacity(dim: usize, capacity: usize) -> Self {
        assert!(capacity >= 1);
        DynamicStore {
            dim,
            capacity,
            editors: HashMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Appends `h`, evicting the oldest vector beyond capacity.
    pub fn update(&mut self, editor_id: &str, h: Vec<S>) -> Result<(), EditorError> {
        if h.len() != self.dim {
            return Err(EditorError::DimMismatch {
                expected: self.dim,
                got: h.len(),
            });
        }
        let q = self.editors.entry(editor_id.to_owned()).or_default();
        q.push_back(h);
        while q.len() > self.capacity {
            q.pop_front();
        }
        Ok(())
    }

    /// Mean of the stored vectors; the zero vector for an unknown editor.
    pub fn query(&self, editor_id: &str) -> Vec<S> {
        match self.editors.get(editor_id) {
            Some(q) if !q.is_empty() => {
                let items: Vec<&Vec<S>> = q.iter().collect();
                mean_vector(&items).expect("non-empty queue")
            }
            _ => vec![S::zero(); self.dim],
        }
    }

    pub fn len_of(&self, editor_id: &str) -> usize {
        self.editors.get(editor_id).map_or(0, VecDeque::len)
    }

    pub fn stored(&self, editor_id: &str) -> Vec<Vec<S>> {
        self.editors
            .get(editor_id)
            .map(|q| q.iter().cloned().collect())
            .unwrap_or_default()
    }
}

/// Thread-safe wrapper: updates take the write lock, queries a read lock.
#[derive(Debug)]
pub struct SharedStore<S> {
    inner: RwLock<DynamicStore<S>>,
}

impl<S: Scalar> SharedStore<S> {
    pub fn new(store: DynamicStore<S>) -> Self {
        SharedStore {
            inner: RwLock::new(store),
        }
    }

    pub fn update(&self, editor_id: &str, h: Vec<S>) -> Result<(), EditorError> {
        self.inner.write().expect("store lock").update(editor_id, h)
    }

    pub fn query(&self, editor_id: &str) -> Vec<S> {
        self.inner.read().expect("store lock").query(editor_id)
    }

    pub fn snapshot(&self) -> DynamicStore<S> {
        self.inner.read().expect("store lock").clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keeps_ten_most_recent() {
        let mut s = DynamicStore::<f64>::new(1);
        for i in 0..12 {
            s.update("e", vec![i as f64]).unwrap();
        }
        assert_eq!(s.len_of("e"), 10);
        assert_eq!(s.stored("e").first().unwrap(), &vec![2.0]);
        assert_eq!(s.query("e"), vec![6.5]);
    }

    #[test]
    fn cold_start_and_single() {
        let mut s = DynamicStore::<f32>::new(3);
        assert_eq!(s.query("nobody"), vec![0.0; 3]);
        s.update("a", vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(s.query("a"), vec![1.0, 2.0, 3.0]);
        assert!(s.update("a", vec![1.0]).is_err());
    }

    #[test]
    fn shared_store_from_threads() {
        let shared = SharedStore::new(DynamicStore::<f64>::new(1));
        std::thread::scope(|sc| {
            for t in 0..4 {
                let sh = &shared;
                sc.spawn(move || {
                    for i in 0..20 {
                        sh.update(&format!("e{t}"), vec![i as f64]).unwrap();
                    }
                });
            }
        });
        for t in 0..4 {
            assert_eq!(shared.query(&format!("e{t}")), vec![14.5]);
        }
    }
}
