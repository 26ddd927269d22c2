use std::fmt;
use std::sync::Arc;

use crate::{Error, Result};

/// Largest order for which associativity is checked exhaustively on load.
pub const ASSOC_CHECK_LIMIT: usize = 256;

#[derive(Debug, PartialEq, Eq)]
struct GroupData {
    name: String,
    order: usize,
    /// Row-major `n × n` table: `mul[a * n + b] = ab`.
    mul: Vec<u32>,
    inv: Vec<u32>,
    identity: usize,
    labels: Option<Vec<String>>,
}

/// A finite group given by its Cayley table. Cheap to clone.
#[derive(Clone)]
pub struct Group(Arc<GroupData>);

impl PartialEq for Group {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.mul == other.0.mul && self.0.order == other.0.order)
    }
}

impl Eq for Group {}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Group({}, order {})", self.0.name, self.0.order)
    }
}

impl Group {
    /// Builds a group from a full Cayley table and checks every axiom,
    /// associativity included when `n ≤ ASSOC_CHECK_LIMIT`.
    pub fn from_table(name: impl Into<String>, table: Vec<Vec<usize>>, labels: Option<Vec<String>>) -> Result<Group> {
        let n = table.len();
        let mut mul = Vec::with_capacity(n * n);
        for (a, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Axiom(format!("row {a} has {} entries, expected {n}", row.len())));
            }
            for &v in row {
                if v >= n {
                    return Err(Error::Axiom(format!("entry {v} in row {a} out of range")));
                }
                mul.push(v as u32);
            }
        }
        let g = Self::from_flat(name.into(), n, mul, labels)?;
        if n <= ASSOC_CHECK_LIMIT {
            g.check_associativity()?;
        }
        Ok(g)
    }

    /// Validates the Latin-square, identity and inverse axioms. Associativity
    /// is the caller's responsibility (catalog families hold it by construction).
    pub(crate) fn from_flat(name: String, n: usize, mul: Vec<u32>, labels: Option<Vec<String>>) -> Result<Group> {
        if n == 0 {
            return Err(Error::Axiom("empty group".into()));
        }
        if n > crate::MAX_DENSE_ORDER {
            return Err(Error::Limit {
                what: "group order",
                got: n,
                limit: crate::MAX_DENSE_ORDER,
            });
        }
        debug_assert_eq!(mul.len(), n * n);
        if let Some(l) = &labels {
            if l.len() != n {
                return Err(Error::Axiom(format!("{} labels for {n} elements", l.len())));
            }
        }
        let mut seen = vec![0u32; n];
        for a in 0..n {
            for b in 0..n {
                let v = mul[a * n + b] as usize;
                if seen[v] == (a as u32) + 1 {
                    return Err(Error::Axiom(format!("row {a} repeats {v}: not a Latin square")));
                }
                seen[v] = (a as u32) + 1;
            }
        }
        seen.fill(0);
        for b in 0..n {
            for a in 0..n {
                let v = mul[a * n + b] as usize;
                if seen[v] == (b as u32) + 1 {
                    return Err(Error::Axiom(format!("column {b} repeats {v}: not a Latin square")));
                }
                seen[v] = (b as u32) + 1;
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| mul[e * n + x] as usize == x && mul[x * n + e] as usize == x))
            .ok_or_else(|| Error::Axiom("no two-sided identity".into()))?;
        let mut inv = vec![0u32; n];
        for x in 0..n {
            let y = (0..n)
                .find(|&y| mul[x * n + y] as usize == identity)
                .ok_or_else(|| Error::Axiom(format!("{x} has no right inverse")))?;
            if mul[y * n + x] as usize != identity {
                return Err(Error::Axiom(format!("inverse of {x} is one-sided")));
            }
            inv[x] = y as u32;
        }
        Ok(Group(Arc::new(GroupData {
            name,
            order: n,
            mul,
            inv,
            identity,
            labels,
        })))
    }

    /// Exhaustive associativity check; reports the first failing triple.
    pub fn check_associativity(&self) -> Result<()> {
        let n = self.order();
        for a in 0..n {
            for b in 0..n {
                let ab = self.mul(a, b);
                for c in 0..n {
                    if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                        return Err(Error::Axiom(format!("(ab)c ≠ a(bc) at a={a}, b={b}, c={c}")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn order(&self) -> usize {
        self.0.order
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.0.mul[a * self.0.order + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.0.inv[a] as usize
    }

    pub fn identity(&self) -> usize {
        self.0.identity
    }

    /// `y x y⁻¹`.
    #[inline]
    pub fn conj(&self, y: usize, x: usize) -> usize {
        self.mul(self.mul(y, x), self.inv(y))
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.0.labels.as_deref()
    }

    pub fn label(&self, x: usize) -> String {
        match &self.0.labels {
            Some(l) => l[x].clone(),
            None => x.to_string(),
        }
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (a + 1..n).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Order of the element `x`.
    pub fn element_order(&self, x: usize) -> usize {
        let e = self.identity();
        let mut k = 1;
        let mut y = x;
        while y != e {
            y = self.mul(y, x);
            k += 1;
        }
        k
    }

    /// The table as rows, for serialization.
    pub fn table(&self) -> Vec<Vec<usize>> {
        let n = self.order();
        (0..n).map(|a| (0..n).map(|b| self.mul(a, b)).collect()).collect()
    }

    pub fn same_as(&self, other: &Group) -> bool {
        self == other
    }

    pub(crate) fn ensure_same(&self, other: &Group) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GroupMismatch)
        }
    }
}
