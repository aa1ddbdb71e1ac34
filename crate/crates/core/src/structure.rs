//! Finite relational structures.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};

/// Index of a domain element (file order).
pub type Elem = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub arity: usize,
    pub tuples: BTreeSet<Vec<Elem>>,
}

/// A finite structure: ordered domain, relation tables and named constants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Structure {
    domain: Vec<String>,
    index: HashMap<String, Elem>,
    relations: BTreeMap<String, Relation>,
    constants: BTreeMap<String, Elem>,
}

impl Structure {
    pub fn new<S: Into<String>>(domain: impl IntoIterator<Item = S>) -> Result<Self> {
        let domain: Vec<String> = domain.into_iter().map(Into::into).collect();
        if domain.is_empty() {
            return Err(Error::EmptyDomain);
        }
        let mut index = HashMap::new();
        for (i, name) in domain.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::DuplicateElement(name.clone()));
            }
        }
        Ok(Self {
            domain,
            index,
            relations: BTreeMap::new(),
            constants: BTreeMap::new(),
        })
    }

    /// Domain `e0 … e{n-1}` with `zero = e0` and `one = e1` when `n ≥ 2`.
    pub fn with_size(n: usize) -> Result<Self> {
        let mut s = Self::new((0..n).map(|i| format!("e{i}")))?;
        if n >= 2 {
            s.constants.insert("zero".into(), 0);
            s.constants.insert("one".into(), 1);
        }
        Ok(s)
    }

    pub fn add_relation<S: AsRef<str>>(
        &mut self,
        name: &str,
        arity: usize,
        tuples: impl IntoIterator<Item = Vec<S>>,
    ) -> Result<()> {
        let mut set = BTreeSet::new();
        for t in tuples {
            if t.len() != arity {
                return Err(Error::RelationArity {
                    name: name.into(),
                    expected: arity,
                    found: t.len(),
                });
            }
            let idx = t
                .iter()
                .map(|e| self.elem(e.as_ref()))
                .collect::<Result<Vec<_>>>()?;
            set.insert(idx);
        }
        self.relations
            .insert(name.to_string(), Relation { arity, tuples: set });
        Ok(())
    }

    pub fn add_relation_indices(
        &mut self,
        name: &str,
        arity: usize,
        tuples: impl IntoIterator<Item = Vec<Elem>>,
    ) -> Result<()> {
        let mut set = BTreeSet::new();
        for t in tuples {
            if t.len() != arity {
                return Err(Error::RelationArity {
                    name: name.into(),
                    expected: arity,
                    found: t.len(),
                });
            }
            if let Some(&bad) = t.iter().find(|&&e| e >= self.domain.len()) {
                return Err(Error::UnknownElement(format!("#{bad}")));
            }
            set.insert(t);
        }
        self.relations
            .insert(name.to_string(), Relation { arity, tuples: set });
        Ok(())
    }

    pub fn set_constant(&mut self, name: &str, element: &str) -> Result<()> {
        let e = self.elem(element)?;
        self.constants.insert(name.to_string(), e);
        Ok(())
    }

    pub fn size(&self) -> usize {
        self.domain.len()
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.domain.len()
    }

    pub fn name(&self, e: Elem) -> &str {
        &self.domain[e]
    }

    pub fn elem(&self, name: &str) -> Result<Elem> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownElement(name.to_string()))
    }

    pub fn relations(&self) -> &BTreeMap<String, Relation> {
        &self.relations
    }

    pub fn relation(&self, name: &str) -> Result<&Relation> {
        self.relations
            .get(name)
            .ok_or_else(|| Error::UnknownRelation(name.to_string()))
    }

    pub fn holds(&self, name: &str, args: &[Elem]) -> Result<bool> {
        let rel = self.relation(name)?;
        if rel.arity != args.len() {
            return Err(Error::RelationArity {
                name: name.into(),
                expected: rel.arity,
                found: args.len(),
            });
        }
        Ok(rel.tuples.contains(args))
    }

    pub fn constants(&self) -> &BTreeMap<String, Elem> {
        &self.constants
    }

    pub fn constant(&self, name: &str) -> Result<Elem> {
        self.constants
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownConstant(name.to_string()))
    }

    /// All tuples of `A^k` in lexicographic order.
    pub fn tuples(&self, k: usize) -> TupleIter {
        TupleIter::new(self.size(), k)
    }

    pub fn format_tuple(&self, t: &[Elem]) -> String {
        let names: Vec<&str> = t.iter().map(|&e| self.name(e)).collect();
        format!("({})", names.join(","))
    }
}

/// Lexicographic enumeration of `{0..n}^k`.
#[derive(Debug, Clone)]
pub struct TupleIter {
    n: usize,
    current: Option<Vec<Elem>>,
}

impl TupleIter {
    pub fn new(n: usize, k: usize) -> Self {
        let current = if n == 0 && k > 0 {
            None
        } else {
            Some(vec![0; k])
        };
        Self { n, current }
    }
}

impl Iterator for TupleIter {
    type Item = Vec<Elem>;

    fn next(&mut self) -> Option<Vec<Elem>> {
        let out = self.current.clone()?;
        let mut next = out.clone();
        let mut i = next.len();
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            next[i] += 1;
            if next[i] < self.n {
                self.current = Some(next);
                break;
            }
            next[i] = 0;
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tuple_iter_counts() {
        assert_eq!(TupleIter::new(3, 2).count(), 9);
        assert_eq!(
            TupleIter::new(3, 0).collect::<Vec<_>>(),
            vec![Vec::<Elem>::new()]
        );
        let t: Vec<_> = TupleIter::new(2, 2).collect();
        assert_eq!(t, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
    }

    #[test]
    fn rejects_bad_relations() {
        let mut s = Structure::new(["a", "b"]).unwrap();
        assert!(matches!(
            s.add_relation("R", 2, [vec!["a"]]),
            Err(Error::RelationArity { .. })
        ));
        assert!(matches!(
            s.add_relation("R", 1, [vec!["c"]]),
            Err(Error::UnknownElement(_))
        ));
        s.add_relation("R", 1, [vec!["a"]]).unwrap();
        assert!(s.holds("R", &[0]).unwrap());
        assert!(!s.holds("R", &[1]).unwrap());
        assert!(Structure::new(Vec::<String>::new()).is_err());
        assert!(Structure::new(["a", "a"]).is_err());
    }
}
